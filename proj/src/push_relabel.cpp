#include "tvl/push_relabel.hpp"

#include <algorithm>

namespace tvl {

PushRelabel::PushRelabel(int nodes, std::size_t edge_hint) : n_(nodes), tr_(nodes, 0.0) {
    staged_.reserve(edge_hint);
}

void PushRelabel::add_tweights(int i, double to_source, double to_sink) {
    double d = tr_[i];
    if (d > 0) to_source += d;
    else to_sink -= d;
    flow_ += std::min(to_source, to_sink);
    tr_[i] = to_source - to_sink;
    max_cap_ = std::max(max_cap_, std::abs(tr_[i]));
}

void PushRelabel::add_edge(int i, int j, double cap, double rev) {
    staged_.push_back({i, j, cap, rev});
    max_cap_ = std::max({max_cap_, cap, rev});
}

void PushRelabel::build() {
    std::vector<int> start(n_ + 1, 0);
    for (const auto& s : staged_) {
        ++start[s.i + 1];
        ++start[s.j + 1];
    }
    for (int i = 0; i < n_; ++i) start[i + 1] += start[i];
    head_.assign(start[n_], 0);
    sister_.assign(start[n_], 0);
    cap_.assign(start[n_], 0.0);
    std::vector<int> pos(start.begin(), start.end() - 1);
    for (const auto& s : staged_) {
        int a = pos[s.i]++, b = pos[s.j]++;
        head_[a] = s.j;
        cap_[a] = s.cap;
        head_[b] = s.i;
        cap_[b] = s.rev;
        sister_[a] = b;
        sister_[b] = a;
    }
    first_ = std::move(start);
    staged_.clear();
    staged_.shrink_to_fit();
}

void PushRelabel::bucket_insert(int i, int l) {
    all_prev_[i] = -1;
    all_next_[i] = all_head_[l];
    if (all_head_[l] >= 0) all_prev_[all_head_[l]] = i;
    all_head_[l] = i;
}

void PushRelabel::bucket_remove(int i, int l) {
    if (all_prev_[i] >= 0) all_next_[all_prev_[i]] = all_next_[i];
    else all_head_[l] = all_next_[i];
    if (all_next_[i] >= 0) all_prev_[all_next_[i]] = all_prev_[i];
}

void PushRelabel::activate(int i) {
    int l = label_[i];
    if (l >= inf_) return;
    act_next_[i] = act_head_[l];
    act_head_[l] = i;
    max_active_ = std::max(max_active_, l);
}

void PushRelabel::global_relabel() {
    // exact residual distances to the sink by backward breadth-first search
    std::fill(label_.begin(), label_.end(), inf_);
    std::fill(all_head_.begin(), all_head_.end(), -1);
    std::fill(act_head_.begin(), act_head_.end(), -1);
    std::vector<int> queue;
    queue.reserve(n_);
    for (int i = 0; i < n_; ++i)
        if (tcap_[i] > eps_) {
            label_[i] = 1;
            queue.push_back(i);
        }
    for (std::size_t q = 0; q < queue.size(); ++q) {
        int i = queue[q];
        for (int a = first_[i]; a < first_[i + 1]; ++a) {
            int j = head_[a];
            if (label_[j] == inf_ && cap_[sister_[a]] > eps_) {
                label_[j] = label_[i] + 1;
                queue.push_back(j);
            }
        }
    }
    max_label_ = 0;
    max_active_ = 0;
    for (int i : queue) {
        bucket_insert(i, label_[i]);
        current_[i] = first_[i];
        max_label_ = std::max(max_label_, label_[i]);
        if (excess_[i] > eps_) activate(i);
    }
    work_ = 0;
}

void PushRelabel::discharge(int i) {
    const long limit = 6L * n_ + static_cast<long>(head_.size()) / 2;
    while (excess_[i] > eps_) {
        if (label_[i] == 1 && tcap_[i] > eps_) {
            double d = std::min(excess_[i], tcap_[i]);
            tcap_[i] -= d;
            excess_[i] -= d;
            pushed_ += d;
            continue;
        }
        const int li = label_[i];
        int a = current_[i];
        for (; a < first_[i + 1]; ++a) {
            if (cap_[a] <= eps_) continue;
            int j = head_[a];
            if (label_[j] != li - 1) continue;
            double d = std::min(excess_[i], cap_[a]);
            cap_[a] -= d;
            cap_[sister_[a]] += d;
            bool was = excess_[j] > eps_;
            excess_[j] += d;
            excess_[i] -= d;
            if (!was && excess_[j] > eps_) activate(j);
            if (excess_[i] <= eps_) break;
        }
        current_[i] = a;
        if (excess_[i] <= eps_) break;

        // relabel
        int nl = tcap_[i] > eps_ ? 1 : inf_;
        int best = first_[i];
        work_ += 12;
        for (int b = first_[i]; b < first_[i + 1]; ++b) {
            ++work_;
            if (cap_[b] > eps_ && label_[head_[b]] + 1 < nl) {
                nl = label_[head_[b]] + 1;
                best = b;
            }
        }
        bucket_remove(i, li);
        if (all_head_[li] < 0) {
            // gap: nothing above li can reach the sink any more
            for (int l = li + 1; l <= max_label_; ++l) {
                for (int k = all_head_[l]; k >= 0; k = all_next_[k]) label_[k] = inf_;
                all_head_[l] = -1;
            }
            label_[i] = inf_;
            max_label_ = li - 1;
            return;
        }
        label_[i] = nl;
        if (nl >= inf_) return;
        current_[i] = best;
        bucket_insert(i, nl);
        max_label_ = std::max(max_label_, nl);
        if (work_ > limit) {
            global_relabel();
            return;
        }
    }
}

double PushRelabel::solve() {
    build();
    eps_ = 1e-13 * max_cap_;
    tcap_.assign(n_, 0.0);
    excess_.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        if (tr_[i] > 0) excess_[i] = tr_[i];
        else tcap_[i] = -tr_[i];
    }
    // a path through every node to the sink has length n, so n + 1 marks
    // nodes that cannot reach it
    inf_ = n_ + 1;
    label_.assign(n_, inf_);
    current_.assign(n_, 0);
    all_next_.assign(n_, -1);
    all_prev_.assign(n_, -1);
    all_head_.assign(inf_ + 1, -1);
    act_next_.assign(n_, -1);
    act_head_.assign(inf_ + 1, -1);
    global_relabel();
    while (max_active_ > 0) {
        int i = act_head_[max_active_];
        if (i < 0) {
            --max_active_;
            continue;
        }
        act_head_[max_active_] = act_next_[i];
        // stale entries after a gap or a global relabel
        if (label_[i] != max_active_ || excess_[i] <= eps_) continue;
        discharge(i);
    }
    return flow_ + pushed_;
}

std::vector<std::uint8_t> PushRelabel::sink_reaching(double eps) const {
    std::vector<std::uint8_t> seen(n_, 0);
    std::vector<int> stack;
    for (int i = 0; i < n_; ++i)
        if (tcap_[i] > eps) {
            seen[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        int j = stack.back();
        stack.pop_back();
        for (int a = first_[j]; a < first_[j + 1]; ++a) {
            int i = head_[a];
            if (!seen[i] && cap_[sister_[a]] > eps) {
                seen[i] = 1;
                stack.push_back(i);
            }
        }
    }
    return seen;
}

}  // namespace tvl
