#include "tvl/rof.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace tvl {

FidelitySpec FidelitySpec::power(double p) {
    if (!(p > 1.0 && p <= 2.0)) throw Error(ErrorCode::InvalidArgument, "fidelity exponent must lie in (1, 2]");
    return FidelitySpec{p};
}

double FidelitySpec::psi(double t) const { return p == 2.0 ? 0.5 * t * t : std::pow(std::abs(t), p) / p; }

double FidelitySpec::dpsi(double t) const {
    if (p == 2.0) return t;
    return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

double FidelitySpec::dpsi_inverse(double y) const {
    if (p == 2.0) return y;
    return std::copysign(std::pow(std::abs(y), 1.0 / (p - 1.0)), y);
}

double FidelitySpec::psi_star(double t) const {
    double qq = q();
    return p == 2.0 ? 0.5 * t * t : std::pow(std::abs(t), qq) / qq;
}

double FidelitySpec::modulus(double t) const {
    double qq = q();
    return std::pow(std::abs(t), qq) / (qq * std::pow(2.0, qq - 2.0));
}

double FidelitySpec::sigma(double y) const {
    if (y <= 0) return 0.0;
    double qq = q();
    return std::pow(y * qq * std::pow(2.0, qq - 3.0), 1.0 / (qq - 1.0));
}

const char* backend_name(Backend b) { return b == Backend::LevelwiseCut ? "levelwise_cut" : "primal_dual"; }

double graph_tv(const ScalarField& u, const PerimeterScheme& scheme, double exterior) {
    const Grid& g = u.grid();
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double a = u[g.index(i, j)];
            for (const auto& f : scheme.families) {
                if (g.inside(i + f.dx, j + f.dy)) total += f.weight * std::abs(a - u[g.index(i + f.dx, j + f.dy)]);
                else total += f.weight * std::abs(a - exterior);
                if (!g.inside(i - f.dx, j - f.dy)) total += f.weight * std::abs(a - exterior);
            }
        }
    return total * g.h;
}

double rof_energy(const ScalarField& u, const ScalarField& data, double alpha, const FidelitySpec& psi,
                  const PerimeterScheme& scheme, double exterior) {
    require_same_grid(u.grid(), data.grid(), "data");
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += psi.psi(u[k] - data[k]);
    return s * u.grid().cell_area() + alpha * graph_tv(u, scheme, exterior);
}

namespace {

struct Quantization {
    double lo = 0.0, hi = 0.0;
    std::vector<double> thresholds;
    std::vector<double> rep;  // value per bin, thresholds.size() + 1 bins

    // bin b holds values in (thresholds[b-1], thresholds[b]], clipped to [lo, hi]
    double bin_lo(std::size_t b) const { return b == 0 ? lo : std::clamp(thresholds[b - 1], lo, hi); }
    double bin_hi(std::size_t b) const { return b == thresholds.size() ? hi : std::clamp(thresholds[b], lo, hi); }
};

std::vector<double> attained_values(const ScalarField& g, std::size_t limit) {
    std::vector<double> v = g.values();
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.size() > limit) v.clear();
    return v;
}

Quantization build_quantization(double lo, double hi, std::vector<double> levels, const DenoiseOptions& opt) {
    Quantization q;
    q.lo = lo;
    q.hi = hi;
    const double range = hi - lo;
    if (opt.thresholds.empty() && range > 0) {
        const int L = std::max(opt.levels, 2);
        for (int k = 0; k < L; ++k) levels.push_back(lo + range * k / (L - 1));
    }
    std::sort(levels.begin(), levels.end());
    const double tiny = 1e-12 * std::max(range, 1e-300);
    std::vector<double> uniq;
    for (double l : levels)
        if (uniq.empty() || l - uniq.back() > tiny) uniq.push_back(l);
    if (opt.thresholds.empty()) {
        for (std::size_t k = 1; k < uniq.size(); ++k) q.thresholds.push_back(0.5 * (uniq[k - 1] + uniq[k]));
    } else {
        // kept even outside [lo, hi] so that label indices match across solves
        q.thresholds = opt.thresholds;
    }
    for (double t : opt.extra_thresholds)
        if (t > lo && t < hi) q.thresholds.push_back(t);
    std::sort(q.thresholds.begin(), q.thresholds.end());
    q.thresholds.erase(std::unique(q.thresholds.begin(), q.thresholds.end()), q.thresholds.end());
    const std::size_t T = q.thresholds.size();
    q.rep.resize(T + 1);
    for (std::size_t b = 0; b <= T; ++b) {
        double a = q.bin_lo(b), c = q.bin_hi(b);
        // a level inside the bin if there is one, the midpoint otherwise
        auto it = std::upper_bound(uniq.begin(), uniq.end(), a);
        q.rep[b] = it != uniq.end() && *it <= c ? *it : 0.5 * (a + c);
    }
    return q;
}

Quantization quantize(const ScalarField& data, double exterior, const DenoiseOptions& opt) {
    std::vector<double> levels = attained_values(data, static_cast<std::size_t>(std::max(opt.levels / 4, 1)));
    levels.push_back(exterior);
    return build_quantization(std::min(data.min(), exterior), std::max(data.max(), exterior), levels, opt);
}

ScalarField make_data(const ScalarField& f, const ScalarField& w) {
    if (w.size() == 0) return f;
    require_same_grid(f.grid(), w.grid(), "noise");
    return f + w;
}

// For each connected plateau of one label, the best constant inside its bin
// with the neighbors' order kept.
void refine_plateaus(const Grid& g, const std::vector<int>& label, const Quantization& q, const ScalarField& data,
                     double alpha, const FidelitySpec& psi, const PerimeterScheme& scheme, double exterior,
                     ScalarField& u) {
    const std::size_t n = g.size();
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::size_t> comp, stack;
    const double a2 = g.cell_area();
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        const int l = label[s];
        comp.clear();
        stack.assign(1, s);
        seen[s] = 1;
        double wd = 0.0, wu = 0.0, we = 0.0;
        while (!stack.empty()) {
            std::size_t p = stack.back();
            stack.pop_back();
            comp.push_back(p);
            int i = g.col(p), j = g.row(p);
            for (const auto& f : scheme.families)
                for (int sg : {1, -1}) {
                    int a = i + sg * f.dx, b = j + sg * f.dy;
                    double w = f.weight * g.h;
                    if (!g.inside(a, b)) {
                        we += w;
                        continue;
                    }
                    std::size_t r = g.index(a, b);
                    if (label[r] == l) {
                        if (!seen[r]) {
                            seen[r] = 1;
                            stack.push_back(r);
                        }
                    } else if (label[r] < l) {
                        wd += w;
                    } else {
                        wu += w;
                    }
                }
        }
        double lo = q.bin_lo(l), hi = q.bin_hi(l);
        auto smooth = [&](double c) {
            double s1 = 0.0;
            for (std::size_t p : comp) s1 += psi.dpsi(c - data[p]);
            return s1 * a2 + alpha * (wd - wu);
        };
        auto slope = [&](double c) {
            double ext = c > exterior ? we : (c < exterior ? -we : 0.0);
            return smooth(c) + alpha * ext;
        };
        double c;
        // the border term has a kink at the exterior value
        double at_ext = exterior >= lo && exterior <= hi ? smooth(exterior) : 0.0;
        if (exterior >= lo && exterior <= hi && std::abs(at_ext) <= alpha * we) c = exterior;
        else if (slope(lo) >= 0) c = lo;
        else if (slope(hi) <= 0) c = hi;
        else {
            double x0 = lo, x1 = hi;
            for (int it = 0; it < 200 && x1 - x0 > 1e-15 * std::max(1.0, std::abs(x0)); ++it) {
                double m = 0.5 * (x0 + x1);
                if (slope(m) > 0) x1 = m;
                else x0 = m;
            }
            c = 0.5 * (x0 + x1);
        }
        for (std::size_t p : comp) u[p] = c;
    }
}

void denoise_levelwise(const ScalarField& data, double alpha, const FidelitySpec& psi, const DenoiseOptions& opt,
                       DenoiseResult& r) {
    const Grid& g = data.grid();
    Quantization q = quantize(data, opt.exterior, opt);
    const int T = static_cast<int>(q.thresholds.size());
    const double c = g.cell_area() / alpha;
    GridCutter cutter(g, opt.scheme);
    std::vector<std::size_t> cells(g.size());
    std::iota(cells.begin(), cells.end(), std::size_t{0});
    const double ext = opt.exterior;
    NestedProblem prob{T, false,
                       [&](int k, std::size_t p) { return c * psi.dpsi(q.thresholds[k] - data[p]); },
                       [&](int k) { return q.thresholds[k] < ext ? Border::Inside : Border::Outside; }};
    r.label = T > 0 ? solve_nested(cutter, prob, cells, std::vector<std::uint8_t>(g.size(), 0))
                    : std::vector<int>(g.size(), 0);
    if (opt.verify && T > 0) {
        for (int k : {0, T / 2, T - 1}) {
            std::vector<double> un(g.size());
            for (std::size_t p = 0; p < g.size(); ++p) un[p] = prob.unary(k, p);
            auto in = cutter.solve(cells, un, std::vector<std::uint8_t>(g.size(), 0), prob.border(k),
                                   Select::Maximal);
            for (std::size_t p = 0; p < g.size(); ++p)
                if ((in[p] != 0) != (k < r.label[p]))
                    throw Error(ErrorCode::NestednessViolation, "level sets are not the independent cuts");
        }
    }
    r.thresholds = q.thresholds;
    r.u_levels = ScalarField(g);
    for (std::size_t p = 0; p < g.size(); ++p) r.u_levels[p] = q.rep[r.label[p]];
    r.u = r.u_levels;
    if (opt.refine) refine_plateaus(g, r.label, q, data, alpha, psi, opt.scheme, ext, r.u);
    // every level problem is solved to optimality by the cuts
    r.gap = 0.0;
}

// Prox of tau psi(. - d) at x: the magnitude m solves m + tau m^{p-1} = |x - d|.
double prox_psi(const FidelitySpec& psi, double tau, double x, double d) {
    double y = x - d;
    if (psi.p == 2.0) return d + y / (1.0 + tau);
    double ay = std::abs(y);
    if (ay == 0.0) return d;
    double m;
    if (psi.p == 1.5) {
        double r = 0.5 * (std::sqrt(tau * tau + 4.0 * ay) - tau);
        m = r * r;
    } else {
        // the left side is concave in m, so Newton from above lands below the
        // root and then increases monotonically
        m = ay;
        for (int it = 0; it < 100; ++it) {
            double pw = std::pow(m, psi.p - 1.0);
            double phi = m + tau * pw - ay;
            double next = m - phi / (1.0 + tau * (psi.p - 1.0) * pw / m);
            if (next <= 0.0) next = 0.5 * m * ay / (ay + tau * pw);
            if (std::abs(next - m) <= 1e-15 * ay) {
                m = next;
                break;
            }
            m = next;
        }
    }
    return d + std::copysign(m, y);
}

void denoise_primal_dual(const ScalarField& data, double alpha, const FidelitySpec& psi, const DenoiseOptions& opt,
                         DenoiseResult& r) {
    const Grid& g = data.grid();
    const int n = static_cast<int>(g.size());
    const double ext = opt.exterior;
    // energy divided by h^2:  sum psi(u - data) + sum_e beta_e |u_a - u_b|
    struct Edge {
        int a, b;  // b < 0: exterior
        double beta;
    };
    std::vector<Edge> edges;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int p = static_cast<int>(g.index(i, j));
            for (const auto& f : opt.scheme.families) {
                double beta = alpha * f.weight / g.h;
                if (g.inside(i + f.dx, j + f.dy)) edges.push_back({p, static_cast<int>(g.index(i + f.dx, j + f.dy)), beta});
                else edges.push_back({p, -1, beta});
                if (!g.inside(i - f.dx, j - f.dy)) edges.push_back({p, -1, beta});
            }
        }
    // diagonal preconditioning with a primal/dual balance b:
    // tau_p = b / sum of incident beta, sigma_e = 1 / (2 b beta_e)
    std::vector<double> tau(n, 0.0);
    for (const auto& e : edges) {
        tau[e.a] += e.beta;
        if (e.b >= 0) tau[e.b] += e.beta;
    }
    const double bal = 0.1;
    for (auto& t : tau) t = bal / t;

    std::vector<double> u(n), ubar(n), z(edges.size(), 0.0), d(n, 0.0);
    for (int p = 0; p < n; ++p) u[p] = data[p];
    auto kt = [&]() {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            d[edges[e].a] += edges[e].beta * z[e];
            if (edges[e].b >= 0) d[edges[e].b] -= edges[e].beta * z[e];
        }
    };
    auto primal = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p) s += psi.psi(u[p] - data[p]);
        for (const auto& e : edges) s += e.beta * std::abs(u[e.a] - (e.b >= 0 ? u[e.b] : ext));
        return s;
    };
    auto dual = [&]() {
        kt();
        double s = 0.0;
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (edges[e].b < 0) s -= edges[e].beta * ext * z[e];
        for (int p = 0; p < n; ++p) s += d[p] * data[p] - psi.psi_star(-d[p]);
        return s;
    };
    const double gap0 = primal() - dual();
    const double target = opt.pd_tolerance * std::max(gap0, 1e-300);
    double gap = gap0;
    int it = 0;
    for (ubar = u; it < opt.pd_max_iterations && gap > target;) {
        for (std::size_t e = 0; e < edges.size(); ++e) {
            double ku = ubar[edges[e].a] - (edges[e].b >= 0 ? ubar[edges[e].b] : ext);
            z[e] = std::clamp(z[e] + 0.5 / bal * ku, -1.0, 1.0);
        }
        kt();
        for (int p = 0; p < n; ++p) {
            double nu = prox_psi(psi, tau[p], u[p] - tau[p] * d[p], data[p]);
            ubar[p] = 2.0 * nu - u[p];
            u[p] = nu;
        }
        ++it;
        if (it % 20 == 0) gap = primal() - dual();
    }
    gap = primal() - dual();
    r.u = ScalarField(g, u);
    r.u_levels = r.u;
    r.gap = gap * g.cell_area();
    r.initial_gap = gap0 * g.cell_area();
    r.iterations = it;
    if (gap > target) throw Error(ErrorCode::NonConvergence, "primal-dual iteration stopped above the gap tolerance");
}

}  // namespace

DenoiseResult denoise(const ScalarField& f, const ScalarField& w, double alpha, const FidelitySpec& psi,
                      const DenoiseOptions& opt) {
    if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    FidelitySpec::power(psi.p);
    auto t0 = std::chrono::steady_clock::now();
    ScalarField data = make_data(f, w);
    DenoiseResult r;
    r.alpha = alpha;
    r.exterior = opt.exterior;
    r.backend = opt.backend;
    r.psi = psi;
    if (opt.backend == Backend::LevelwiseCut) denoise_levelwise(data, alpha, psi, opt, r);
    else denoise_primal_dual(data, alpha, psi, opt, r);
    r.v = ScalarField(data.grid());
    for (std::size_t p = 0; p < data.size(); ++p) r.v[p] = -psi.dpsi(r.u[p] - data[p]) / alpha;
    r.energy = rof_energy(r.u, data, alpha, psi, opt.scheme, opt.exterior);
    r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

DenoiseResult denoise(const ScalarField& f, double alpha, const FidelitySpec& psi, const DenoiseOptions& opt) {
    return denoise(f, ScalarField(), alpha, psi, opt);
}

BinarySet level_set(const DenoiseResult& r, double s) {
    auto it = std::find(r.thresholds.begin(), r.thresholds.end(), s);
    if (it == r.thresholds.end() || r.label.empty()) return s >= r.exterior ? r.u.above(s) : r.u.below(s);
    // stored cut: the plateau values may sit exactly on s after clamping
    const int k = static_cast<int>(it - r.thresholds.begin());
    BinarySet e(r.u.grid());
    for (std::size_t p = 0; p < e.grid().size(); ++p) e.set(p, (r.label[p] > k) == (s >= r.exterior));
    return e;
}

LevelOptimality level_optimality_check(const DenoiseResult& r, const ScalarField& f, const ScalarField& w, double s,
                                       const PerimeterScheme& scheme) {
    ScalarField data = make_data(f, w);
    require_same_grid(r.u.grid(), data.grid(), "data");
    BinarySet e = level_set(r, s);
    if (e.empty()) throw Error(ErrorCode::EmptyLevelSet, "level set is empty");
    const bool upper = s >= r.exterior;
    LevelOptimality out;
    out.per = perimeter(e, scheme);
    double cert = 0.0, lit = 0.0;
    for (std::size_t p = 0; p < data.size(); ++p)
        if (e[p]) {
            cert += r.v[p];
            lit += r.psi.dpsi(data[p] - s) / r.alpha;
        }
    double a = data.grid().cell_area();
    out.certificate = (upper ? cert : -cert) * a;
    lit = (upper ? lit : -lit) * a;
    out.residual = std::abs(out.per - out.certificate) / out.per;
    out.literal_residual = std::abs(out.per - lit) / out.per;
    return out;
}

double dual_stability_bound(const FidelitySpec& psi, double w_norm, double alpha) {
    if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    return psi.sigma(w_norm / alpha);
}

double hard_rule_ceiling(const FidelitySpec& psi) {
    const double theta = 2.0 * std::sqrt(std::acos(-1.0));
    return psi.modulus(theta) / theta;
}

DualStabilityReport verify_dual_stability(const ScalarField& f, const ScalarField& w, double alpha,
                                          const FidelitySpec& psi, const DenoiseOptions& opt) {
    auto rw = denoise(f, w, alpha, psi, opt);
    auto r0 = denoise(f, ScalarField(), alpha, psi, opt);
    DualStabilityReport rep;
    rep.lhs = lp_norm(rw.v - r0.v, 2.0);
    rep.bound = dual_stability_bound(psi, w.size() ? lp_norm(w, 2.0) : 0.0, alpha);
    rep.rhs = rep.bound * 1.05;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

ComparisonReport verify_comparison(const ScalarField& f, const ScalarField& g, double alpha, const FidelitySpec& psi,
                                   const DenoiseOptions& opt) {
    require_same_grid(f.grid(), g.grid(), "comparison data");
    for (std::size_t p = 0; p < f.size(); ++p)
        if (g[p] > f[p]) throw Error(ErrorCode::InvalidArgument, "comparison needs g <= f");
    DenoiseOptions o = opt;
    if (o.backend == Backend::LevelwiseCut && o.thresholds.empty()) {
        // one threshold set for both solves, placed over the joint range
        std::size_t few = static_cast<std::size_t>(std::max(o.levels / 8, 1));
        std::vector<double> levels = attained_values(f, few), vg = attained_values(g, few);
        levels.insert(levels.end(), vg.begin(), vg.end());
        levels.push_back(o.exterior);
        Quantization q = build_quantization(std::min(g.min(), o.exterior), std::max(f.max(), o.exterior), levels, o);
        o.thresholds = q.thresholds;
        o.extra_thresholds.clear();
    }
    ComparisonReport rep;
    rep.uf = denoise(f, alpha, psi, o);
    rep.ug = denoise(g, alpha, psi, o);
    rep.ordered = true;
    for (std::size_t p = 0; p < f.size(); ++p) {
        rep.max_violation = std::max(rep.max_violation, rep.ug.u[p] - rep.uf.u[p]);
        if (o.backend == Backend::LevelwiseCut) {
            if (rep.ug.label[p] > rep.uf.label[p]) rep.ordered = false;
        }
    }
    if (o.backend == Backend::PrimalDual) {
        double range = std::max(f.max(), o.exterior) - std::min(g.min(), o.exterior);
        rep.ordered = rep.max_violation <= 1e-6 * range;
    }
    auto in_range = [&](const DenoiseResult& r, const ScalarField& d) {
        double lo = std::min(d.min(), o.exterior), hi = std::max(d.max(), o.exterior);
        double tol = 1e-9 * std::max(hi - lo, 1.0);
        return r.u.min() >= lo - tol && r.u.max() <= hi + tol;
    };
    rep.range_f = in_range(rep.uf, f);
    rep.range_g = in_range(rep.ug, g);
    return rep;
}

}  // namespace tvl
