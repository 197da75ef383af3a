#include "tvl/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tvl {

bool Constraint::allows(std::size_t k) const {
    switch (kind) {
        case Kind::Inside: return d[k];
        case Kind::Outside: return !d[k];
        default: return true;
    }
}

namespace {

void check_constraint_grid(const CurvatureField& kappa, const Constraint& c) {
    if (c.kind != Constraint::Kind::None) require_same_grid(kappa.grid(), c.d.grid(), "constraint");
}

std::vector<std::size_t> allowed_cells(const Grid& g, const Constraint& c) {
    std::vector<std::size_t> cells;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (c.allows(k)) cells.push_back(k);
    return cells;
}

}  // namespace

double pmc_energy(const BinarySet& e, const CurvatureField& kappa, const PerimeterScheme& scheme, Border border) {
    require_same_grid(e.grid(), kappa.grid(), "kappa");
    double s = 0.0;
    for (std::size_t k = 0; k < kappa.size(); ++k)
        if (e[k]) s += kappa[k];
    return cut_length(e, scheme, border) - s * e.grid().cell_area();
}

PmcResult minimize_pmc(const CurvatureField& kappa, const Constraint& constraint, Select select,
                       const PerimeterScheme& scheme, Border border) {
    check_constraint_grid(kappa, constraint);
    const Grid& g = kappa.grid();
    for (double v : kappa.values())
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "curvature field is not finite");
    auto cells = allowed_cells(g, constraint);
    std::vector<double> un(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) un[k] = -kappa[cells[k]] * g.cell_area();
    GridCutter cutter(g, scheme);
    std::vector<std::uint8_t> fixed(g.size(), 0);
    auto in = cutter.solve(cells, un, fixed, border, select);
    PmcResult r{BinarySet(g), 0.0};
    for (std::size_t k = 0; k < cells.size(); ++k) r.set.set(cells[k], in[k] != 0);
    r.energy = pmc_energy(r.set, kappa, scheme, border);
    if (border == Border::Inside && r.energy < 0 && r.set.touches_border())
        throw Error(ErrorCode::UnboundedBelow, "minimizer joins the exterior with negative energy");
    return r;
}

RelaxedResult minimize_pmc_relaxed(const CurvatureField& kappa, const Constraint& constraint,
                                   const RelaxedOptions& opt, const PerimeterScheme& scheme, Border border) {
    check_constraint_grid(kappa, constraint);
    const Grid& g = kappa.grid();
    auto cells = allowed_cells(g, constraint);
    const int n = static_cast<int>(cells.size());
    std::vector<int> node(g.size(), -1);
    for (int k = 0; k < n; ++k) node[cells[k]] = k;

    // (Ku)_e = w (u_a - u_b) or w (u_a - c) for an edge to a fixed value c
    struct Edge {
        int a, b;
        double c, w;
    };
    std::vector<Edge> edges;
    for (int k = 0; k < n; ++k) {
        int i = g.col(cells[k]), j = g.row(cells[k]);
        for (const auto& f : scheme.families) {
            double w = f.weight * g.h;
            for (int sg : {1, -1}) {
                int a = i + sg * f.dx, b = j + sg * f.dy;
                if (!g.inside(a, b)) {
                    if (border == Border::Outside) edges.push_back({k, -1, 0.0, w});
                    else if (border == Border::Inside) edges.push_back({k, -1, 1.0, w});
                    continue;
                }
                int m = node[g.index(a, b)];
                if (m < 0) edges.push_back({k, -1, 0.0, w});
                else if (sg == 1) edges.push_back({k, m, 0.0, w});
            }
        }
    }
    std::vector<double> c(n), tau(n, 0.0), sigma(edges.size());
    for (int k = 0; k < n; ++k) c[k] = kappa[cells[k]] * g.cell_area();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        tau[edges[e].a] += edges[e].w;
        if (edges[e].b >= 0) tau[edges[e].b] += edges[e].w;
        sigma[e] = 1.0 / ((edges[e].b >= 0 ? 2.0 : 1.0) * edges[e].w);
    }
    for (int k = 0; k < n; ++k) tau[k] = tau[k] > 0 ? 1.0 / tau[k] : 1.0;

    std::vector<double> u(n, 0.0), ubar(n, 0.0), z(edges.size(), 0.0), d(n, 0.0);
    auto primal = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (const auto& e : edges) s += e.w * std::abs(x[e.a] - (e.b >= 0 ? x[e.b] : e.c));
        for (int k = 0; k < n; ++k) s -= c[k] * x[k];
        return s;
    };
    auto dual = [&]() {
        std::fill(d.begin(), d.end(), 0.0);
        double s = 0.0;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            d[edges[e].a] += edges[e].w * z[e];
            if (edges[e].b >= 0) d[edges[e].b] -= edges[e].w * z[e];
            else s -= edges[e].w * edges[e].c * z[e];
        }
        for (int k = 0; k < n; ++k) s += std::min(0.0, d[k] - c[k]);
        return s;
    };
    double gap0 = primal(u) - dual();
    double gap = gap0, pv = primal(u), dv = pv - gap0;
    int it = 0;
    const double target = opt.gap_tolerance * std::max(gap0, 1e-300);
    while (it < opt.max_iterations && gap > target) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            d[edges[e].a] += edges[e].w * z[e];
            if (edges[e].b >= 0) d[edges[e].b] -= edges[e].w * z[e];
        }
        for (int k = 0; k < n; ++k) {
            double nu = std::clamp(u[k] - tau[k] * (d[k] - c[k]), 0.0, 1.0);
            ubar[k] = 2.0 * nu - u[k];
            u[k] = nu;
        }
        for (std::size_t e = 0; e < edges.size(); ++e) {
            double ku = edges[e].w * (ubar[edges[e].a] - (edges[e].b >= 0 ? ubar[edges[e].b] : edges[e].c));
            z[e] = std::clamp(z[e] + sigma[e] * ku, -1.0, 1.0);
        }
        ++it;
        if (it % 25 == 0 || it == opt.max_iterations) {
            pv = primal(u);
            dv = dual();
            gap = pv - dv;
        }
    }
    pv = primal(u);
    dv = dual();
    RelaxedResult r;
    r.u = ScalarField(g);
    for (int k = 0; k < n; ++k) r.u[cells[k]] = u[k];
    r.set = r.u.above(0.5);
    r.energy = pv;
    r.dual = dv;
    r.gap = pv - dv;
    r.iterations = it;
    if (r.gap > target) throw Error(ErrorCode::NonConvergence, "relaxed solve did not reach the gap tolerance");
    return r;
}

Normalization normalization(const BinarySet& d) {
    if (d.empty()) throw Error(ErrorCode::EmptyInput, "empty set");
    const Grid& g = d.grid();
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (d[k]) {
            Point p = g.center(k);
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    Normalization n{{0.5 * (x0 + x1), 0.5 * (y0 + y1)}, 0.0};
    for (std::size_t k = 0; k < g.size(); ++k)
        if (d[k]) {
            Point p = g.center(k);
            n.radius = std::max(n.radius, std::hypot(p.x - n.center.x, p.y - n.center.y));
        }
    n.radius = std::max(n.radius, 0.5 * g.h);
    return n;
}

ScalarField density_field(const Grid& g, const Normalization& n, const DensitySpec& spec) {
    ScalarField f(g);
    double r = spec.R * n.radius;
    for (std::size_t k = 0; k < g.size(); ++k) {
        Point p = g.center(k);
        f[k] = std::hypot(p.x - n.center.x, p.y - n.center.y) <= r ? 1.0 : spec.g_far;
    }
    return f;
}

BinarySet ParametricFamily::minimizer(int k) const {
    BinarySet e(d.grid());
    for (std::size_t q = 0; q < entry.size(); ++q) e.set(q, entry[q] <= k);
    return e;
}

BinarySet ParametricFamily::set(int k) const {
    BinarySet e = minimizer(k);
    return direction == Direction::Inner ? e : e.complement();
}

std::vector<double> geometric_lambdas(double lo, double hi, int n) {
    if (!(lo > 0) || !(hi > lo) || n < 2) throw Error(ErrorCode::InvalidArgument, "bad lambda range");
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = lo * std::pow(hi / lo, double(k) / (n - 1));
    return v;
}

std::vector<double> default_lambdas(const Grid& g) { return geometric_lambdas(0.5, 4.0 / g.h, 64); }

namespace {

void check_lambdas(const std::vector<double>& l) {
    if (l.empty()) throw Error(ErrorCode::InvalidArgument, "empty lambda grid");
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (!(l[k] > 0)) throw Error(ErrorCode::InvalidArgument, "lambda values must be positive");
        if (k > 0 && !(l[k] > l[k - 1])) throw Error(ErrorCode::InvalidArgument, "lambda grid must increase");
    }
}

constexpr double kConfineFactor = 2.0;  // B(c, 2q)
constexpr double kDim = 2.0;

bool outside_confinement(const Grid& g, std::size_t q, const Normalization& n) {
    Point p = g.center(q);
    return std::hypot(p.x - n.center.x, p.y - n.center.y) > kConfineFactor * n.radius;
}

}  // namespace

ParametricFamily level_family(const BinarySet& d, Direction dir, const std::vector<double>& lambdas,
                              const FamilyOptions& opt) {
    check_lambdas(lambdas);
    if (d.empty()) throw Error(ErrorCode::EmptyInput, "empty set");
    const Grid& g = d.grid();
    const int K = static_cast<int>(lambdas.size());
    const double a = g.cell_area();
    ParametricFamily fam{dir, d, lambdas, {}};
    GridCutter cutter(g, opt.scheme);

    if (dir == Direction::Inner) {
        std::vector<std::size_t> cells;
        for (std::size_t q = 0; q < g.size(); ++q)
            if (d[q]) cells.push_back(q);
        NestedProblem p{K, true, [&](int k, std::size_t) { return -lambdas[k] * a; },
                        [](int) { return Border::Outside; }};
        fam.entry = solve_nested(cutter, p, cells, std::vector<std::uint8_t>(g.size(), 0));
        if (opt.verify) {
            for (int k : {0, K / 2, K - 1}) {
                std::vector<double> un(cells.size(), -lambdas[k] * a);
                auto in = cutter.solve(cells, un, std::vector<std::uint8_t>(g.size(), 0), Border::Outside,
                                       Select::Maximal);
                for (std::size_t i = 0; i < cells.size(); ++i)
                    if ((in[i] != 0) != (fam.entry[cells[i]] <= k))
                        throw Error(ErrorCode::NestednessViolation, "inner family disagrees with a direct solve");
            }
        }
        return fam;
    }

    Normalization nz = normalization(d);
    double reach = kConfineFactor * nz.radius;
    if (nz.center.x - reach < g.xmin() || nz.center.x + reach > g.xmax() || nz.center.y - reach < g.ymin() ||
        nz.center.y + reach > g.ymax())
        throw Error(ErrorCode::DomainTooSmall, "grid does not contain B(c, 2q) around the set");
    ScalarField dens = density_field(g, nz, opt.density);

    // first index above the confinement threshold lambda q > 2d
    int k0 = K;
    if (opt.confine)
        for (int k = 0; k < K; ++k)
            if (lambdas[k] * nz.radius > 2.0 * kDim) {
                k0 = k;
                break;
            }

    std::vector<std::size_t> cells;
    for (std::size_t q = 0; q < g.size(); ++q)
        if (!d[q]) cells.push_back(q);
    std::vector<int> entry(g.size(), K);
    if (k0 > 0) {
        NestedProblem p{k0, true, [&](int k, std::size_t q) { return -lambdas[k] * dens[q] * a; },
                        [](int) { return Border::Free; }};
        auto r = solve_nested(cutter, p, cells, std::vector<std::uint8_t>(g.size(), 0));
        for (std::size_t q : cells)
            if (r[q] < k0) entry[q] = r[q];
    }
    if (k0 < K) {
        std::vector<std::uint8_t> state(g.size(), 0);
        std::vector<std::size_t> inner;
        for (std::size_t q : cells) {
            if (entry[q] < K || outside_confinement(g, q, nz)) state[q] = 1;
            else inner.push_back(q);
        }
        NestedProblem p{K - k0, true, [&](int k, std::size_t q) { return -lambdas[k0 + k] * dens[q] * a; },
                        [](int) { return Border::Free; }};
        auto r = solve_nested(cutter, p, inner, state);
        for (std::size_t q : cells) {
            if (entry[q] < K) continue;
            if (state[q]) entry[q] = k0;
            else if (r[q] < K - k0) entry[q] = k0 + r[q];
        }
    }
    fam.entry = std::move(entry);

    if (opt.verify) {
        for (int k : {0, K / 2, K - 1}) {
            std::vector<std::size_t> free;
            std::vector<std::uint8_t> state(g.size(), 0);
            for (std::size_t q : cells) {
                if (k >= k0 && outside_confinement(g, q, nz)) state[q] = 1;
                else free.push_back(q);
            }
            std::vector<double> un(free.size());
            for (std::size_t i = 0; i < free.size(); ++i) un[i] = -lambdas[k] * dens[free[i]] * a;
            auto in = cutter.solve(free, un, state, Border::Free, Select::Maximal);
            for (std::size_t i = 0; i < free.size(); ++i)
                if ((in[i] != 0) != (fam.entry[free[i]] <= k))
                    throw Error(ErrorCode::NestednessViolation, "outer family disagrees with a direct solve");
        }
    }
    return fam;
}

VariationalCurvature variational_curvature(const BinarySet& d, const std::vector<double>& lambdas,
                                           const CurvatureOptions& opt) {
    check_lambdas(lambdas);
    const Grid& g = d.grid();
    const int K = static_cast<int>(lambdas.size());
    VariationalCurvature out{ScalarField(g), lambdas, {}, 1.0};
    for (int k = 1; k < K; ++k) out.max_ratio = std::max(out.max_ratio, lambdas[k] / lambdas[k - 1]);
    if (opt.inner) {
        auto fam = level_family(d, Direction::Inner, lambdas, opt.family);
        for (std::size_t q = 0; q < g.size(); ++q) {
            if (!d[q]) continue;
            int e = fam.entry[q];
            if (e >= K) {
                out.uncaptured.push_back(q);
                e = K - 1;
            }
            out.kappa[q] = lambdas[e];
        }
    }
    if (opt.outer) {
        auto fam = level_family(d, Direction::Outer, lambdas, opt.family);
        ScalarField dens = density_field(g, normalization(d), opt.family.density);
        for (std::size_t q = 0; q < g.size(); ++q) {
            if (d[q]) continue;
            int e = fam.entry[q];
            if (e >= K) {
                out.uncaptured.push_back(q);
                e = K - 1;
            }
            out.kappa[q] = -lambdas[e] * dens[q];
        }
    }
    std::sort(out.uncaptured.begin(), out.uncaptured.end());
    return out;
}

CheegerResult cheeger(const BinarySet& d, double tol, const PerimeterScheme& scheme) {
    if (d.empty()) throw Error(ErrorCode::EmptyInput, "empty set");
    const Grid& g = d.grid();
    const double a = g.cell_area();
    std::vector<std::size_t> cells;
    for (std::size_t q = 0; q < g.size(); ++q)
        if (d[q]) cells.push_back(q);
    GridCutter cutter(g, scheme);
    const std::vector<std::uint8_t> fixed(g.size(), 0);
    auto solve_at = [&](double lambda) {
        std::vector<double> un(cells.size(), -lambda * a);
        auto in = cutter.solve(cells, un, fixed, Border::Outside, Select::Maximal);
        BinarySet e(g);
        for (std::size_t i = 0; i < cells.size(); ++i) e.set(cells[i], in[i] != 0);
        return e;
    };
    const double per_d = cut_length(d, scheme, Border::Outside);
    CheegerResult r{per_d / d.area(), d, 0};
    // Dinkelbach: the ratio of every improving minimizer is a strictly smaller lambda
    for (;;) {
        ++r.iterations;
        BinarySet e = solve_at(r.h);
        double en = e.empty() ? 0.0 : cut_length(e, scheme, Border::Outside) - r.h * e.area();
        if (!e.empty() && en >= -tol * per_d) {
            r.set = e;
            break;
        }
        if (e.empty()) break;
        r.h = cut_length(e, scheme, Border::Outside) / e.area();
        r.set = e;
        if (r.iterations > 200) throw Error(ErrorCode::NonConvergence, "Cheeger iteration did not settle");
    }
    return r;
}

CurvatureInequalityReport check_curvature_inequality(const CurvatureField& kappa, double xi, double r0, int samples,
                                                     std::uint64_t seed, const PerimeterScheme& scheme) {
    const Grid& g = kappa.grid();
    CurvatureInequalityReport rep;
    rep.samples = samples;
    std::vector<std::size_t> hot;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (kappa[k] != 0.0) hot.push_back(k);
    if (hot.empty() || samples <= 0) return rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_any(0, g.size() - 1), pick_hot(0, hot.size() - 1);
    const double rmin = std::min(2.0 * g.h, r0);
    const double kpi = std::acos(-1.0);
    for (int s = 0; s < samples; ++s) {
        Point c = g.center(u01(rng) < 0.5 ? pick_any(rng) : hot[pick_hot(rng)]);
        double r = rmin + (r0 - rmin) * u01(rng);
        BinarySet ball = rasterize_disk(g, c, r);
        int type = s % 3;
        BinarySet test = ball;
        if (type == 1) {
            double th = 2 * kpi * u01(rng), off = (2 * u01(rng) - 1) * r;
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (!test[k]) continue;
                Point p = g.center(k);
                test.set(k, (p.x - c.x) * std::cos(th) + (p.y - c.y) * std::sin(th) <= off);
            }
        } else if (type == 2) {
            // superlevel set of |kappa| inside the ball
            double mx = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k)
                if (ball[k]) mx = std::max(mx, std::abs(kappa[k]));
            double t = mx * u01(rng);
            for (std::size_t k = 0; k < g.size(); ++k)
                if (test[k]) test.set(k, std::abs(kappa[k]) >= t && kappa[k] != 0.0);
        }
        if (test.empty()) continue;
        double per = perimeter(test, scheme);
        if (per <= 0) continue;
        double ip = 0.0, im = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (test[k]) {
                ip += std::max(kappa[k], 0.0);
                im += std::max(-kappa[k], 0.0);
            }
        ip *= g.cell_area() / per;
        im *= g.cell_area() / per;
        if (std::max(ip, im) > std::max(rep.ratio_plus, rep.ratio_minus)) {
            rep.witness_center = c;
            rep.witness_radius = r;
        }
        rep.ratio_plus = std::max(rep.ratio_plus, ip);
        rep.ratio_minus = std::max(rep.ratio_minus, im);
    }
    rep.passes = rep.ratio_plus <= xi && rep.ratio_minus <= xi;
    return rep;
}

}  // namespace tvl
