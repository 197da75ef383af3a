#include "tvl/maxflow.hpp"

#include <algorithm>
#include <limits>

namespace tvl {

MaxFlow::MaxFlow(int nodes, std::size_t edge_hint)
    : first_(nodes + 1, 0),
      tr_(nodes, 0.0),
      parent_(nodes, kNone),
      ts_(nodes, 0),
      dist_(nodes, 0),
      sink_(nodes, 0),
      active_(nodes, 0) {
    staged_.reserve(edge_hint);
}

void MaxFlow::add_tweights(int i, double to_source, double to_sink) {
    double d = tr_[i];
    if (d > 0) to_source += d;
    else to_sink -= d;
    flow_ += std::min(to_source, to_sink);
    tr_[i] = to_source - to_sink;
    max_cap_ = std::max(max_cap_, std::abs(tr_[i]));
}

void MaxFlow::add_edge(int i, int j, double cap, double rev) {
    staged_.push_back({i, j, cap, rev});
    max_cap_ = std::max({max_cap_, cap, rev});
}

void MaxFlow::build() {
    // arcs of each node stored contiguously
    const int n = nodes();
    std::vector<int> start(n + 1, 0);
    for (const auto& s : staged_) {
        ++start[s.i + 1];
        ++start[s.j + 1];
    }
    for (int i = 0; i < n; ++i) start[i + 1] += start[i];
    arcs_.assign(start[n], Arc{});
    sister_.assign(start[n], 0);
    std::vector<int> pos(start.begin(), start.end() - 1);
    for (const auto& s : staged_) {
        int a = pos[s.i]++, b = pos[s.j]++;
        arcs_[a] = {s.j, s.cap};
        arcs_[b] = {s.i, s.rev};
        sister_[a] = b;
        sister_[b] = a;
    }
    first_ = std::move(start);
    staged_.clear();
    staged_.shrink_to_fit();
}

void MaxFlow::set_active(int i) {
    if (!active_[i]) {
        active_[i] = 1;
        queue_.push_back(i);
    }
}

int MaxFlow::next_active() {
    while (!queue_.empty()) {
        int i = queue_.front();
        queue_.pop_front();
        active_[i] = 0;
        if (parent_[i] != kNone) return i;
    }
    return -1;
}

void MaxFlow::augment(int middle) {
    // middle runs from a source-tree node to a sink-tree node
    double b = arcs_[middle].cap;
    for (int i = arcs_[sister(middle)].head;;) {
        int a = parent_[i];
        if (a == kTerminal) break;
        b = std::min(b, arcs_[sister(a)].cap);
        i = arcs_[a].head;
    }
    {
        int i = arcs_[sister(middle)].head;
        while (parent_[i] != kTerminal) i = arcs_[parent_[i]].head;
        b = std::min(b, tr_[i]);
    }
    for (int i = arcs_[middle].head;;) {
        int a = parent_[i];
        if (a == kTerminal) break;
        b = std::min(b, arcs_[a].cap);
        i = arcs_[a].head;
    }
    {
        int i = arcs_[middle].head;
        while (parent_[i] != kTerminal) i = arcs_[parent_[i]].head;
        b = std::min(b, -tr_[i]);
    }

    arcs_[sister(middle)].cap += b;
    arcs_[middle].cap -= b;
    for (int i = arcs_[sister(middle)].head;;) {
        int a = parent_[i];
        if (a == kTerminal) {
            tr_[i] -= b;
            if (tr_[i] <= eps_) {
                parent_[i] = kOrphan;
                orphans_.push_front(i);
            }
            break;
        }
        arcs_[a].cap += b;
        arcs_[sister(a)].cap -= b;
        if (arcs_[sister(a)].cap <= eps_) {
            parent_[i] = kOrphan;
            orphans_.push_front(i);
        }
        i = arcs_[a].head;
    }
    for (int i = arcs_[middle].head;;) {
        int a = parent_[i];
        if (a == kTerminal) {
            tr_[i] += b;
            if (tr_[i] >= -eps_) {
                parent_[i] = kOrphan;
                orphans_.push_front(i);
            }
            break;
        }
        arcs_[sister(a)].cap += b;
        arcs_[a].cap -= b;
        if (arcs_[a].cap <= eps_) {
            parent_[i] = kOrphan;
            orphans_.push_front(i);
        }
        i = arcs_[a].head;
    }
    flow_ += b;
}

void MaxFlow::adopt(int i) {
    const bool sink = sink_[i] != 0;
    int best = kNone;
    int dmin = std::numeric_limits<int>::max();
    for (int a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
        double res = sink ? arcs_[a0].cap : arcs_[sister(a0)].cap;
        if (res <= eps_) continue;
        int j = arcs_[a0].head;
        if ((sink_[j] != 0) != sink || parent_[j] == kNone) continue;
        // walk to the root, reusing distance labels stamped in this round
        int d = 0;
        int k = j;
        while (true) {
            if (ts_[k] == time_) {
                d += dist_[k];
                break;
            }
            int a = parent_[k];
            ++d;
            if (a == kTerminal) {
                ts_[k] = time_;
                dist_[k] = 1;
                break;
            }
            if (a == kOrphan) {
                d = std::numeric_limits<int>::max();
                break;
            }
            k = arcs_[a].head;
        }
        if (d == std::numeric_limits<int>::max()) continue;
        if (d < dmin) {
            best = a0;
            dmin = d;
        }
        for (k = j; ts_[k] != time_; k = arcs_[parent_[k]].head) {
            ts_[k] = time_;
            dist_[k] = d--;
        }
    }
    parent_[i] = best;
    if (best != kNone) {
        ts_[i] = time_;
        dist_[i] = dmin + 1;
        return;
    }
    for (int a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
        int j = arcs_[a0].head;
        if ((sink_[j] != 0) != sink) continue;
        int a = parent_[j];
        if (a == kNone) continue;
        double res = sink ? arcs_[a0].cap : arcs_[sister(a0)].cap;
        if (res > eps_) set_active(j);
        if (a != kTerminal && a != kOrphan && arcs_[a].head == i) {
            parent_[j] = kOrphan;
            orphans_.push_back(j);
        }
    }
}

double MaxFlow::solve() {
    build();
    const int n = nodes();
    // residuals below eps_ count as saturated, so rounding leftovers do not spawn paths
    eps_ = 1e-13 * max_cap_;
    for (int i = 0; i < n; ++i) {
        if (tr_[i] > eps_) {
            sink_[i] = 0;
            parent_[i] = kTerminal;
            set_active(i);
            ts_[i] = 0;
            dist_[i] = 1;
        } else if (tr_[i] < -eps_) {
            sink_[i] = 1;
            parent_[i] = kTerminal;
            set_active(i);
            ts_[i] = 0;
            dist_[i] = 1;
        } else {
            parent_[i] = kNone;
        }
    }
    int current = -1;
    while (true) {
        int i = -1;
        if (current >= 0) {
            i = current;
            current = -1;
            active_[i] = 0;
            if (parent_[i] == kNone) i = -1;
        }
        if (i < 0) {
            i = next_active();
            if (i < 0) break;
        }
        int middle = -1;
        if (!sink_[i]) {
            for (int a = first_[i]; a < first_[i + 1]; ++a) {
                if (arcs_[a].cap <= eps_) continue;
                int j = arcs_[a].head;
                if (parent_[j] == kNone) {
                    sink_[j] = 0;
                    parent_[j] = sister(a);
                    ts_[j] = ts_[i];
                    dist_[j] = dist_[i] + 1;
                    set_active(j);
                } else if (sink_[j]) {
                    middle = a;
                    break;
                } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
                    parent_[j] = sister(a);
                    ts_[j] = ts_[i];
                    dist_[j] = dist_[i] + 1;
                }
            }
        } else {
            for (int a = first_[i]; a < first_[i + 1]; ++a) {
                if (arcs_[sister(a)].cap <= eps_) continue;
                int j = arcs_[a].head;
                if (parent_[j] == kNone) {
                    sink_[j] = 1;
                    parent_[j] = sister(a);
                    ts_[j] = ts_[i];
                    dist_[j] = dist_[i] + 1;
                    set_active(j);
                } else if (!sink_[j]) {
                    middle = sister(a);
                    break;
                } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
                    parent_[j] = sister(a);
                    ts_[j] = ts_[i];
                    dist_[j] = dist_[i] + 1;
                }
            }
        }
        ++time_;
        if (middle >= 0) {
            active_[i] = 1;
            current = i;
            augment(middle);
            while (!orphans_.empty()) {
                int o = orphans_.front();
                orphans_.pop_front();
                adopt(o);
            }
        }
    }
    return flow_;
}

std::vector<std::uint8_t> MaxFlow::source_reachable(double eps) const {
    const int n = nodes();
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<int> stack;
    for (int i = 0; i < n; ++i)
        if (tr_[i] > eps) {
            seen[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int a = first_[i]; a < first_[i + 1]; ++a) {
            int j = arcs_[a].head;
            if (!seen[j] && arcs_[a].cap > eps) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
    return seen;
}

std::vector<std::uint8_t> MaxFlow::sink_reaching(double eps) const {
    const int n = nodes();
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<int> stack;
    for (int i = 0; i < n; ++i)
        if (tr_[i] < -eps) {
            seen[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        int j = stack.back();
        stack.pop_back();
        for (int a = first_[j]; a < first_[j + 1]; ++a) {
            int i = arcs_[a].head;
            if (!seen[i] && arcs_[sister(a)].cap > eps) {
                seen[i] = 1;
                stack.push_back(i);
            }
        }
    }
    return seen;
}

}  // namespace tvl
