#include "tvl/cut.hpp"

#include <algorithm>

#include "tvl/push_relabel.hpp"

namespace tvl {

GridCutter::GridCutter(const Grid& g, const PerimeterScheme& scheme)
    : grid_(g), scheme_(scheme), node_(g.size(), -1) {}

std::vector<std::uint8_t> GridCutter::solve(const std::vector<std::size_t>& free_cells,
                                            const std::vector<double>& unary,
                                            const std::vector<std::uint8_t>& fixed_in, Border border, Select sel,
                                            double* flow) {
    const int n = static_cast<int>(free_cells.size());
    std::vector<std::uint8_t> out(n, 0);
    if (n == 0) {
        if (flow) *flow = 0.0;
        return out;
    }
    for (int k = 0; k < n; ++k) node_[free_cells[k]] = k;

    const double h = grid_.h;
    PushRelabel mf(n, static_cast<std::size_t>(n) * scheme_.families.size());
    std::vector<double> src(n, 0.0), snk(n, 0.0);
    for (int k = 0; k < n; ++k) {
        if (unary[k] > 0) snk[k] += unary[k];
        else src[k] -= unary[k];
    }
    for (int k = 0; k < n; ++k) {
        std::size_t p = free_cells[k];
        int i = grid_.col(p), j = grid_.row(p);
        for (const auto& f : scheme_.families) {
            double w = f.weight * h;
            for (int sg : {1, -1}) {
                int a = i + sg * f.dx, b = j + sg * f.dy;
                if (!grid_.inside(a, b)) {
                    if (border == Border::Outside) snk[k] += w;
                    else if (border == Border::Inside) src[k] += w;
                    continue;
                }
                std::size_t q = grid_.index(a, b);
                int m = node_[q];
                if (m >= 0) {
                    if (sg == 1) mf.add_edge(k, m, w, w);
                } else if (fixed_in[q]) {
                    src[k] += w;
                } else {
                    snk[k] += w;
                }
            }
        }
    }
    // the edges are symmetric, so swapping the terminals turns the minimal
    // source set into the complement of the maximal one
    const bool swap = sel == Select::Minimal;
    for (int k = 0; k < n; ++k) mf.add_tweights(k, swap ? snk[k] : src[k], swap ? src[k] : snk[k]);
    double fl = mf.solve();
    if (flow) *flow = fl;
    auto t = mf.sink_reaching(1e-9 * mf.max_capacity());
    for (int k = 0; k < n; ++k) out[k] = (t[k] != 0) == swap ? 1 : 0;
    for (int k = 0; k < n; ++k) node_[free_cells[k]] = -1;
    return out;
}

namespace {

struct NestedSolver {
    GridCutter& cutter;
    const NestedProblem& prob;
    std::vector<std::uint8_t>& state;
    std::vector<int>& rank;

    void run(int lo, int hi, const std::vector<std::size_t>& cells) {
        if (lo >= hi) return;
        if (cells.empty()) return;
        int mid = lo + (hi - lo) / 2;
        std::vector<double> un(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) un[k] = prob.unary(mid, cells[k]);
        auto in = cutter.solve(cells, un, state, prob.border(mid), Select::Maximal);
        std::vector<std::size_t> a, b;
        for (std::size_t k = 0; k < cells.size(); ++k) (in[k] ? a : b).push_back(cells[k]);
        if (prob.grows) {
            // cells in the mid set are in every later set; the rest are out of every earlier one
            for (std::size_t q : a) rank[q] = mid;
            for (std::size_t q : b) rank[q] = mid + 1;
            for (std::size_t q : b) state[q] = 0;
            run(lo, mid, a);
            for (std::size_t q : a) state[q] = 1;
            run(mid + 1, hi, b);
        } else {
            for (std::size_t q : a) rank[q] = mid + 1;
            for (std::size_t q : b) rank[q] = mid;
            for (std::size_t q : b) state[q] = 0;
            run(mid + 1, hi, a);
            for (std::size_t q : a) state[q] = 1;
            run(lo, mid, b);
        }
    }
};

}  // namespace

std::vector<int> solve_nested(GridCutter& cutter, const NestedProblem& prob, const std::vector<std::size_t>& free_cells,
                              std::vector<std::uint8_t> state) {
    const std::size_t n = cutter.grid().size();
    std::vector<int> rank(n);
    for (std::size_t q = 0; q < n; ++q) {
        bool in = state[q] != 0;
        rank[q] = prob.grows ? (in ? 0 : prob.count) : (in ? prob.count : 0);
    }
    NestedSolver s{cutter, prob, state, rank};
    s.run(0, prob.count, free_cells);
    return rank;
}

double cut_length(const BinarySet& e, const PerimeterScheme& scheme, Border border) {
    const Grid& g = e.grid();
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            bool in = e.at(i, j);
            for (const auto& f : scheme.families) {
                for (int sg : {1, -1}) {
                    int a = i + sg * f.dx, b = j + sg * f.dy;
                    if (!g.inside(a, b)) {
                        if ((border == Border::Outside && in) || (border == Border::Inside && !in)) total += f.weight;
                        continue;
                    }
                    if (sg == 1 && e.at(a, b) != in) total += f.weight;
                }
            }
        }
    return total * g.h;
}

double cut_energy(const BinarySet& e, const std::vector<double>& unary, const PerimeterScheme& scheme, Border border) {
    double s = cut_length(e, scheme, border);
    for (std::size_t k = 0; k < unary.size(); ++k)
        if (e[k]) s += unary[k];
    return s;
}

}  // namespace tvl
