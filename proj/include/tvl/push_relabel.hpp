#pragma once

#include <cstdint>
#include <vector>

namespace tvl {

// Highest-label push-relabel with global relabeling and the gap heuristic.
// Runs the preflow phase only, which already fixes the minimum cut whose
// sink side is smallest; that is all the callers need.
class PushRelabel {
public:
    explicit PushRelabel(int nodes, std::size_t edge_hint = 0);

    void add_tweights(int i, double to_source, double to_sink);
    void add_edge(int i, int j, double cap, double rev);

    // Maximum flow value.
    double solve();

    // Nodes that reach the sink in the residual network.
    std::vector<std::uint8_t> sink_reaching(double eps) const;

    int nodes() const { return n_; }
    double max_capacity() const { return max_cap_; }

private:
    struct Staged {
        int i, j;
        double cap, rev;
    };

    int n_ = 0;
    int inf_ = 1;
    std::vector<Staged> staged_;
    std::vector<double> tr_;
    std::vector<int> first_;
    std::vector<int> head_;
    std::vector<int> sister_;
    std::vector<double> cap_;
    std::vector<double> tcap_;
    std::vector<double> excess_;
    std::vector<int> label_;
    std::vector<int> current_;
    std::vector<int> all_next_, all_prev_, all_head_;
    std::vector<int> act_next_, act_head_;
    int max_label_ = 0;
    int max_active_ = 0;
    double pushed_ = 0.0;
    double flow_ = 0.0;
    double max_cap_ = 0.0;
    double eps_ = 0.0;
    long work_ = 0;

    void build();
    void global_relabel();
    void discharge(int i);
    void bucket_insert(int i, int l);
    void bucket_remove(int i, int l);
    void activate(int i);
};

}  // namespace tvl
