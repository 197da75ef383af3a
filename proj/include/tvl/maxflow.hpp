#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace tvl {

// Boykov-Kolmogorov augmenting-path max-flow with search-tree reuse.
// Nodes on the source side of a cut are "in the set".
class MaxFlow {
public:
    explicit MaxFlow(int nodes, std::size_t edge_hint = 0);

    // Adds terminal capacities source->i and i->sink.
    void add_tweights(int i, double to_source, double to_sink);
    // Adds arcs i->j with cap and j->i with rev.
    void add_edge(int i, int j, double cap, double rev);

    double solve();

    // Nodes reachable from the source in the residual network (minimal source set).
    std::vector<std::uint8_t> source_reachable(double eps) const;
    // Nodes that reach the sink in the residual network (complement of the maximal source set).
    std::vector<std::uint8_t> sink_reaching(double eps) const;

    int nodes() const { return static_cast<int>(tr_.size()); }
    double max_capacity() const { return max_cap_; }

private:
    static constexpr int kNone = -1;
    static constexpr int kTerminal = -2;
    static constexpr int kOrphan = -3;

    struct Arc {
        int head = 0;
        double cap = 0.0;
    };
    struct Staged {
        int i, j;
        double cap, rev;
    };

    std::vector<int> first_;  // arcs of node i are [first_[i], first_[i+1])
    std::vector<Arc> arcs_;
    std::vector<int> sister_;
    std::vector<Staged> staged_;
    std::vector<double> tr_;  // >0: residual from source, <0: residual to sink
    std::vector<int> parent_;
    std::vector<long> ts_;
    std::vector<int> dist_;
    std::vector<std::uint8_t> sink_;
    std::vector<std::uint8_t> active_;
    std::deque<int> queue_;
    std::deque<int> orphans_;
    long time_ = 0;
    double flow_ = 0.0;
    double max_cap_ = 0.0;
    double eps_ = 0.0;

    int sister(int a) const { return sister_[a]; }
    void build();
    void set_active(int i);
    int next_active();
    void augment(int middle);
    void adopt(int i);
};

}  // namespace tvl
