#include "tvl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace tvl {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

bool nontrivial(const BinarySet& e) { return !e.empty() && !e.full(); }

// Boundary distance with the conventions 0 for two trivial sets and inf for one.
double boundary_distance(const BinarySet& a, const BinarySet& b) {
    bool ta = nontrivial(a), tb = nontrivial(b);
    if (!ta && !tb) return a == b ? 0.0 : kInf;
    if (!ta || !tb) return kInf;
    return hausdorff(boundary(a), boundary(b));
}

double set_distance(const BinarySet& a, const BinarySet& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return kInf;
    return hausdorff(a, b);
}

std::vector<double> attained(const ScalarField& f) {
    std::vector<double> v = f.values();
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

ScalarField sum_of_balls(const Grid& g, const std::vector<Ball>& balls, const std::vector<double>& values) {
    ScalarField f(g);
    for (std::size_t b = 0; b < balls.size(); ++b) {
        BinarySet m = rasterize_disk(g, balls[b].center, balls[b].radius);
        for (std::size_t k = 0; k < g.size(); ++k)
            if (m[k]) f[k] += values[b];
    }
    return f;
}

void make_pingpong(const Grid& g, int depth, Phantom& p) {
    if (depth < 1 || depth > 12) throw Error(ErrorCode::InvalidArgument, "ping-pong depth must lie in [1, 12]");
    const double shrink = 0.8, offset = 1.5, scale = 1.0 / 1.8;
    const int count = 1 << depth;  // strings with last nonzero digit at position <= depth, including the empty one
    std::vector<int> sign(count, 1);
    sign[0] = 1;
    double top = 0.5 * (1.0 - std::ldexp(1.0, -depth));
    double y = top;
    for (int j = 1; j <= depth; ++j) {
        double rho = std::ldexp(1.0, -j - 1);
        y -= rho;
        int row = 1 << (j - 1);
        for (int m = 0; m < row; ++m) {
            int i = row + m;
            // prefix digits b(1..j-1) are the bits of m, most significant first
            double a = std::ldexp(1.0, -j);
            for (int k = 1; k < j; ++k)
                if ((m >> (j - 1 - k)) & 1) a += std::ldexp(1.0, -k);
            int pm = m, len = j - 1;
            while (len > 0 && (pm & 1) == 0) {
                pm >>= 1;
                --len;
            }
            int parent = len == 0 ? 0 : (1 << (len - 1)) + (pm >> 1);
            sign[i] = -sign[parent];
            double x = -0.25 + (2 * m + 1) * rho + sign[i] * offset;
            p.balls.push_back({{x * scale, y * scale}, shrink * rho * scale});
            p.ball_values.push_back(a);
            p.offset_sign.push_back(sign[i]);
        }
        y -= rho;
    }
    p.f = sum_of_balls(g, p.balls, p.ball_values);
}

// S^lambda for rho = 1/lambda: empty below the Cheeger constant (2 + sqrt(pi)) / side.
BinarySet rounded_square_set(const Grid& g, double x0, double y0, double side, double rho) {
    BinarySet e(g);
    if (side / rho <= 2.0 + std::sqrt(std::acos(-1.0))) return e;
    for (std::size_t k = 0; k < g.size(); ++k) {
        Point q = g.center(k);
        double a = q.x - x0, b = q.y - y0;
        if (a <= 0 || b <= 0 || a >= side || b >= side) continue;
        double cx = std::clamp(a, rho, side - rho), cy = std::clamp(b, rho, side - rho);
        e.set(k, std::hypot(a - cx, b - cy) < rho);
    }
    return e;
}

double support_radius(const ScalarField& u, double exterior) {
    const Grid& g = u.grid();
    double tol = 1e-9 * std::max(1.0, std::max(std::abs(u.max()), std::abs(u.min())));
    double r = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (std::abs(u[k] - exterior) > tol) {
            Point q = g.center(k);
            r = std::max(r, std::hypot(q.x, q.y));
        }
    return r;
}

std::vector<double> radii_or_default(const std::vector<double>& radii, double h) {
    if (!radii.empty()) return radii;
    return {2 * h, 4 * h, 8 * h};
}

void density_minima(const BinarySet& e, const std::vector<double>& radii, double& inner, double& outer) {
    inner = outer = -1.0;
    if (!nontrivial(e)) return;
    DensityProfile prof = density_profile(e, radii);
    inner = *std::min_element(prof.inner_min.begin(), prof.inner_min.end());
    outer = *std::min_element(prof.outer_min.begin(), prof.outer_min.end());
}

void components_against(const BinarySet& e, const BinarySet& truth, int& count, int& spurious) {
    count = spurious = 0;
    if (e.empty()) return;
    std::vector<int> lab = connected_components(e, PerimeterScheme::make(8), &count);
    std::vector<std::uint8_t> hit(count, 0);
    for (std::size_t k = 0; k < lab.size(); ++k)
        if (lab[k] >= 0 && truth[k]) hit[lab[k]] = 1;
    for (int c = 0; c < count; ++c) spurious += hit[c] ? 0 : 1;
}

void fill_metrics(ConvergenceRow& row, const BinarySet& e, const BinarySet& truth, const std::vector<double>& radii) {
    row.dh_boundary = boundary_distance(e, truth);
    row.dh_sets = set_distance(e, truth);
    row.dh_complements = set_distance(e.complement(), truth.complement());
    row.symdiff = symmetric_difference_area(e, truth);
    density_minima(e, radii, row.density_inner, row.density_outer);
    components_against(e, truth, row.components, row.spurious);
}

struct Sandwich {
    bool ok = false;
    ParametricFamily inner, outer;
    VariationalCurvature kappa;
};

Sandwich prepare_sandwich(const BinarySet& d, const ExperimentOptions& opt, ConvergenceReport& rep) {
    Sandwich sw;
    std::vector<double> lambdas = opt.lambdas.empty() ? default_lambdas(d.grid()) : opt.lambdas;
    try {
        sw.inner = level_family(d, Direction::Inner, lambdas);
        sw.outer = level_family(d, Direction::Outer, lambdas);
        sw.kappa = variational_curvature(d, lambdas);
        sw.ok = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DomainTooSmall) throw;
        rep.warnings.push_back(std::string("sandwich not evaluated: ") + e.what());
    }
    return sw;
}

int sandwich_flag(const Sandwich& sw, const BinarySet& e, double alpha, double s) {
    if (!sw.ok) return -1;
    int li = -1, mi = -1;
    for (int k = 0; k < sw.inner.size(); ++k) {
        if (sw.inner.lambdas[k] < (1.0 - s) / alpha) li = k;
        if (sw.outer.lambdas[k] < s / alpha) mi = k;
    }
    bool ok = true;
    if (li >= 0) ok = ok && sw.inner.set(li).subset_of(e);
    if (mi >= 0) ok = ok && e.subset_of(sw.outer.set(mi));
    return ok ? 1 : 0;
}

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

void check_levels(const Phantom& p, const std::vector<double>& s_list) {
    if (s_list.empty()) throw Error(ErrorCode::InvalidArgument, "no evaluation levels");
    for (double s : s_list)
        if (p.attains(s)) throw Error(ErrorCode::InvalidArgument, "level " + fmt(s) + " is an attained value of the phantom");
}

// Final-step checks shared by both runs; returns false on failure.
bool assert_final(ConvergenceReport& rep, std::size_t first, double limit, const char* what) {
    bool ok = true;
    for (std::size_t k = first; k < rep.rows.size(); ++k) {
        const ConvergenceRow& r = rep.rows[k];
        if (!(r.dh_boundary <= limit)) {
            rep.warnings.push_back(std::string(what) + ": s = " + fmt(r.s) + " final boundary distance " +
                                   fmt(r.dh_boundary) + " exceeds " + fmt(limit));
            ok = false;
        }
        double m = std::max(r.dh_sets, r.dh_complements);
        if (std::isfinite(r.dh_boundary) && !(r.dh_boundary <= m + 2 * rep.h)) {
            rep.warnings.push_back("boundary distance exceeds set distances at s = " + fmt(r.s));
            ok = false;
        }
    }
    return ok;
}

}  // namespace

const char* phantom_kind_name(PhantomKind k) {
    switch (k) {
        case PhantomKind::Disk: return "disk";
        case PhantomKind::Square: return "square";
        case PhantomKind::Polygon: return "polygon";
        case PhantomKind::SquarePlusFarBall: return "square_plus_far_ball";
        case PhantomKind::Stack: return "piecewise_constant_stack";
        case PhantomKind::TruncatedPingpong: return "truncated_pingpong";
    }
    return "?";
}

PhantomKind parse_phantom_kind(const std::string& s) {
    for (PhantomKind k : {PhantomKind::Disk, PhantomKind::Square, PhantomKind::Polygon, PhantomKind::SquarePlusFarBall,
                          PhantomKind::Stack, PhantomKind::TruncatedPingpong})
        if (s == phantom_kind_name(k)) return k;
    if (s == "stack") return PhantomKind::Stack;
    if (s == "pingpong") return PhantomKind::TruncatedPingpong;
    throw Error(ErrorCode::InvalidArgument, "unknown phantom kind: " + s);
}

bool Phantom::attains(double s) const { return std::binary_search(values.begin(), values.end(), s); }

Phantom make_phantom(const Grid& g, const PhantomSpec& spec) {
    Phantom p;
    p.kind = spec.kind;
    switch (spec.kind) {
        case PhantomKind::Disk:
            if (!(spec.radius > 0 && spec.radius <= 1)) throw Error(ErrorCode::InvalidArgument, "disk radius must lie in (0, 1]");
            p.f = indicator(rasterize_disk(g, {0, 0}, spec.radius));
            p.indicator = true;
            break;
        case PhantomKind::Square:
        case PhantomKind::SquarePlusFarBall: {
            double a = 0.5 * spec.side;
            if (!(a > 0 && a * std::sqrt(2.0) <= 1)) throw Error(ErrorCode::InvalidArgument, "square must fit in the unit ball");
            p.f = indicator(rasterize_rect(g, -a, -a, a, a));
            p.indicator = true;
            if (spec.kind == PhantomKind::SquarePlusFarBall) {
                if (!(spec.ell > 0 && spec.ball_radius > 0)) throw Error(ErrorCode::InvalidArgument, "far ball needs positive offset and radius");
                p.balls.push_back({{-a - spec.ell, -a - spec.ell}, spec.ball_radius});
                p.ball_values.push_back(1.0);
                p.offset_sign.push_back(1);
            }
            break;
        }
        case PhantomKind::Polygon: {
            std::vector<Point> poly = spec.polygon;
            if (poly.empty()) poly = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.0}, {0.0, 0.0}, {0.0, 0.5}, {-0.5, 0.5}};
            if (poly.size() < 3) throw Error(ErrorCode::InvalidArgument, "polygon needs three vertices");
            for (Point q : poly)
                if (std::hypot(q.x, q.y) > 1.0) throw Error(ErrorCode::InvalidArgument, "polygon must lie in the unit ball");
            p.f = indicator(rasterize_polygon(g, poly));
            p.indicator = true;
            break;
        }
        case PhantomKind::Stack: {
            std::vector<double> radii = spec.stack_radii.empty() ? std::vector<double>{0.6, 0.3} : spec.stack_radii;
            for (double r : radii)
                if (!(r > 0 && r <= 1)) throw Error(ErrorCode::InvalidArgument, "stack radii must lie in (0, 1]");
            for (double r : radii) {
                p.balls.push_back({{0, 0}, r});
                p.ball_values.push_back(1.0);
                p.offset_sign.push_back(1);
            }
            p.f = sum_of_balls(g, p.balls, p.ball_values);
            break;
        }
        case PhantomKind::TruncatedPingpong:
            make_pingpong(g, spec.depth, p);
            break;
    }
    if (p.f.max() == 0.0) throw Error(ErrorCode::EmptyInput, "phantom is not resolved by the grid");
    p.values = attained(p.f);
    p.support = p.f.above(0.0) | p.f.below(0.0);
    return p;
}

double pingpong_adversarial_level(int depth) {
    double a = 0.0;
    for (int k = 2; k <= depth; k += 2) a += std::ldexp(1.0, -k);
    if (depth % 2 == 1) a += std::ldexp(1.0, -depth);  // the last digit must be 1
    return a - std::ldexp(1.0, -depth - 2);
}

int pingpong_adversarial_ball(const Phantom& p) {
    if (p.kind != PhantomKind::TruncatedPingpong) throw Error(ErrorCode::InvalidArgument, "not a ping-pong phantom");
    int depth = 0;
    while ((1 << depth) - 1 < static_cast<int>(p.balls.size())) ++depth;
    double target = pingpong_adversarial_level(depth) + std::ldexp(1.0, -depth - 2);
    for (std::size_t k = 0; k < p.ball_values.size(); ++k)
        if (p.ball_values[k] == target) return static_cast<int>(k);
    throw Error(ErrorCode::InvalidArgument, "adversarial ball not found");
}

double ball_removal_distance(const Phantom& p, double s, int k) {
    const Grid& g = p.f.grid();
    BinarySet gs = p.truth(s);
    BinarySet without = gs.minus(rasterize_disk(g, p.balls.at(k).center, p.balls.at(k).radius));
    return boundary_distance(gs, without);
}

const char* noise_kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::ScaledBump: return "scaled_bump";
        case NoiseKind::IidGaussian: return "iid_gaussian";
        case NoiseKind::FarIndicator: return "far_indicator";
    }
    return "?";
}

NoiseKind parse_noise_kind(const std::string& s) {
    for (NoiseKind k : {NoiseKind::ScaledBump, NoiseKind::IidGaussian, NoiseKind::FarIndicator})
        if (s == noise_kind_name(k)) return k;
    throw Error(ErrorCode::InvalidArgument, "unknown noise kind: " + s);
}

double NoiseModel::amplitude(int step) const { return scale * std::pow(decay, step); }

Ball NoiseModel::far_ball(int step) const {
    double l = ell * std::pow(decay, 0.5 * step);
    return {{anchor.x - l, anchor.y - l}, ball_radius * std::pow(decay, step)};
}

ScalarField NoiseModel::realize(const Grid& g, int step) const {
    if (!(decay > 0 && decay <= 1)) throw Error(ErrorCode::InvalidArgument, "noise decay must lie in (0, 1]");
    if (!(support > 0)) throw Error(ErrorCode::InvalidArgument, "noise support must be positive");
    ScalarField w(g);
    double a = amplitude(step);
    switch (kind) {
        case NoiseKind::ScaledBump:
            for (std::size_t k = 0; k < g.size(); ++k) {
                Point q = g.center(k);
                double t = (q.x * q.x + q.y * q.y) / (support * support);
                if (t < 1) w[k] = a * std::exp(1.0 - 1.0 / (1.0 - t));
            }
            break;
        case NoiseKind::IidGaussian: {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(step)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> n(0.0, 1.0);
            for (std::size_t k = 0; k < g.size(); ++k) {
                double z;
                do z = n(rng);
                while (std::abs(z) > 4.0);
                Point q = g.center(k);
                if (std::hypot(q.x, q.y) < support) w[k] = a * z;
            }
            break;
        }
        case NoiseKind::FarIndicator: {
            Ball b = far_ball(step);
            w = indicator(rasterize_disk(g, b.center, b.radius), a);
            break;
        }
    }
    return w;
}

const char* rule_kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::Hard: return "hard";
        case RuleKind::Easy: return "easy";
        case RuleKind::Linear: return "linear";
    }
    return "?";
}

RuleKind parse_rule_kind(const std::string& s) {
    for (RuleKind k : {RuleKind::Hard, RuleKind::Easy, RuleKind::Linear})
        if (s == rule_kind_name(k)) return k;
    throw Error(ErrorCode::InvalidArgument, "unknown parameter rule: " + s);
}

namespace {

double psi_integral(const ScalarField& w, const FidelitySpec& psi) {
    double s = 0.0;
    for (double x : w.values()) s += psi.psi(x);
    return s * w.grid().cell_area();
}

}  // namespace

void ParameterRule::validate(const FidelitySpec& psi) const {
    if (!(constant > 0)) throw Error(ErrorCode::RuleViolation, "rule constant must be positive");
    if (kind == RuleKind::Hard && !(constant < hard_rule_ceiling(psi)))
        throw Error(ErrorCode::RuleViolation,
                    "hard rule constant " + fmt(constant) + " is not below the ceiling " + fmt(hard_rule_ceiling(psi)));
}

double ParameterRule::alpha(const ScalarField& w, const FidelitySpec& psi) const {
    validate(psi);
    double a = 0.0;
    switch (kind) {
        case RuleKind::Hard: a = lp_norm(w, 2.0) / constant; break;
        case RuleKind::Easy: a = psi_integral(w, psi) / constant; break;
        case RuleKind::Linear: a = constant * lp_norm(w, 2.0); break;
    }
    if (!(a > 0)) throw Error(ErrorCode::InvalidArgument, "rule gives a zero parameter for zero noise");
    return a;
}

bool ParameterRule::satisfied(const ScalarField& w, double a, const FidelitySpec& psi) const {
    if (!(a > 0)) return false;
    const double slack = 1.0 + 1e-12;
    switch (kind) {
        case RuleKind::Hard: return lp_norm(w, 2.0) / a <= constant * slack;
        case RuleKind::Easy: return psi_integral(w, psi) / a <= constant * slack;
        case RuleKind::Linear: return a >= constant * lp_norm(w, 2.0) / slack;
    }
    return false;
}

void ConvergenceReport::write_csv(std::ostream& os) const {
    os << "step,alpha,s,noise_norm,dh_boundary,dh_sets,dh_complements,symdiff,support_radius,"
          "density_inner,density_outer,sandwich,curvature_violation,components,spurious\n";
    for (const auto& r : rows)
        os << r.step << ',' << fmt(r.alpha) << ',' << fmt(r.s) << ',' << fmt(r.noise_norm) << ','
           << fmt(r.dh_boundary) << ',' << fmt(r.dh_sets) << ',' << fmt(r.dh_complements) << ',' << fmt(r.symdiff)
           << ',' << fmt(r.support_radius) << ',' << fmt(r.density_inner) << ',' << fmt(r.density_outer) << ','
           << r.sandwich << ',' << fmt(r.curvature_violation) << ',' << r.components << ',' << r.spurious << '\n';
}

std::string ConvergenceReport::csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
}

std::vector<double> default_levels(const Phantom& p) {
    if (p.indicator) return {0.25, 0.5, 0.75};
    std::vector<double> s;
    for (std::size_t k = 0; k + 1 < p.values.size(); ++k)
        if (p.values[k + 1] > 0) s.push_back(0.5 * (p.values[k] + p.values[k + 1]));
    return s;
}

ConvergenceReport run_noiseless_convergence(const Phantom& phantom, const std::vector<double>& alphas,
                                            const std::vector<double>& s_list, const ExperimentOptions& opt) {
    check_levels(phantom, s_list);
    if (alphas.empty()) throw Error(ErrorCode::InvalidArgument, "empty alpha schedule");
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (!(alphas[k] > 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
        if (k > 0 && !(alphas[k] < alphas[k - 1])) throw Error(ErrorCode::InvalidArgument, "alpha schedule must decrease");
    }
    const Grid& g = phantom.f.grid();
    ConvergenceReport rep;
    rep.h = g.h;
    std::vector<double> radii = radii_or_default(opt.density_radii, g.h);
    Sandwich sw;
    BinarySet d = phantom.f.above(0.5);
    if (opt.instrument && phantom.indicator) sw = prepare_sandwich(d, opt, rep);

    DenoiseOptions so = opt.solver;
    so.extra_thresholds.insert(so.extra_thresholds.end(), s_list.begin(), s_list.end());
    std::vector<std::size_t> final_rows;
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        DenoiseResult r = denoise(phantom.f, alphas[ai], opt.psi, so);
        double srad = support_radius(r.u, r.exterior);
        double viol = -1.0;
        if (sw.ok) viol = curvature_violation(r, sw.kappa.kappa, 1e-6 / alphas[ai]);
        for (double s : s_list) {
            ConvergenceRow row;
            row.step = static_cast<int>(ai);
            row.alpha = alphas[ai];
            row.s = s;
            row.support_radius = srad;
            row.curvature_violation = viol;
            BinarySet e = level_set(r, s), truth = phantom.truth(s);
            fill_metrics(row, e, truth, radii);
            if (opt.on_level) opt.on_level(row.step, row.alpha, s, e, truth);
            if (phantom.indicator) row.sandwich = sandwich_flag(sw, e, alphas[ai], s);
            if (row.sandwich == 0) rep.warnings.push_back("sandwich inclusion fails at alpha " + fmt(row.alpha) + ", s " + fmt(s));
            rep.rows.push_back(row);
        }
    }

    std::size_t ns = s_list.size();
    std::size_t first = rep.rows.size() - ns;
    bool ok = assert_final(rep, first, 3 * g.h, "noiseless");
    std::size_t tail = std::min<std::size_t>(4, alphas.size());
    for (std::size_t si = 0; si < ns; ++si)
        for (std::size_t a = alphas.size() - tail + 1; a < alphas.size(); ++a) {
            double prev = rep.rows[(a - 1) * ns + si].dh_boundary, cur = rep.rows[a * ns + si].dh_boundary;
            if (cur > prev + g.h) {
                rep.warnings.push_back("boundary distance increases at alpha " + fmt(alphas[a]) + ", s " + fmt(s_list[si]));
                ok = false;
            }
        }
    rep.passed = ok;
    return rep;
}

ConvergenceReport run_noisy_convergence(const Phantom& phantom, const NoiseModel& noise, const ParameterRule& rule,
                                        int n_steps, const std::vector<double>& s_list,
                                        const ExperimentOptions& opt) {
    if (!phantom.indicator) throw Error(ErrorCode::InvalidArgument, "noisy runs need an indicator phantom");
    check_levels(phantom, s_list);
    rule.validate(opt.psi);
    if (n_steps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one step");
    if (!opt.alphas.empty() && static_cast<int>(opt.alphas.size()) != n_steps)
        throw Error(ErrorCode::InvalidArgument, "explicit alpha sequence has the wrong length");
    const Grid& g = phantom.f.grid();
    ConvergenceReport rep;
    rep.h = g.h;
    std::vector<double> radii = radii_or_default(opt.density_radii, g.h);
    double bound = opt.support_bound > 0 ? opt.support_bound : std::max(1.0, noise.support) + 2 * g.h;

    DenoiseOptions so = opt.solver;
    so.extra_thresholds.insert(so.extra_thresholds.end(), s_list.begin(), s_list.end());
    for (int n = 0; n < n_steps; ++n) {
        ScalarField w = noise.realize(g, n);
        double a;
        if (opt.alphas.empty()) {
            a = rule.alpha(w, opt.psi);
        } else {
            a = opt.alphas[n];
            if (!rule.satisfied(w, a, opt.psi))
                throw Error(ErrorCode::RuleViolation, "alpha " + fmt(a) + " breaks the " + rule_kind_name(rule.kind) +
                                                          " rule at step " + std::to_string(n));
        }
        DenoiseResult r = denoise(phantom.f, w, a, opt.psi, so);
        double srad = support_radius(r.u, r.exterior);
        double wn = lp_norm(w, 2.0);
        for (double s : s_list) {
            ConvergenceRow row;
            row.step = n;
            row.alpha = a;
            row.s = s;
            row.noise_norm = wn;
            row.support_radius = srad;
            BinarySet e = level_set(r, s), truth = phantom.truth(s);
            fill_metrics(row, e, truth, radii);
            if (opt.on_level) opt.on_level(n, a, s, e, truth);
            rep.rows.push_back(row);
        }
    }

    bool ok = assert_final(rep, rep.rows.size() - s_list.size(), 5 * g.h, "noisy");
    for (const auto& row : rep.rows)
        if (row.support_radius > bound) {
            rep.warnings.push_back("support radius " + fmt(row.support_radius) + " exceeds " + fmt(bound) +
                                   " at step " + std::to_string(row.step));
            ok = false;
            break;
        }
    rep.passed = ok;
    return rep;
}

SquareCircleReport run_square_circle(const Phantom& phantom, double constant, const std::vector<double>& s_list,
                                     const DenoiseOptions& solver) {
    if (phantom.kind != PhantomKind::SquarePlusFarBall || phantom.balls.empty())
        throw Error(ErrorCode::InvalidArgument, "needs a square_plus_far_ball phantom");
    const Grid& g = phantom.f.grid();
    const Ball& b = phantom.balls.front();
    BinarySet ball = rasterize_disk(g, b.center, b.radius);
    if (ball.empty() || (ball & phantom.support).count() > 0)
        throw Error(ErrorCode::InvalidArgument, "far ball must be resolved and disjoint from the square");
    ScalarField w = indicator(ball);
    SquareCircleReport rep;
    rep.constant = constant;
    rep.w_norm = lp_norm(w, 2.0);
    rep.alpha = ParameterRule{RuleKind::Linear, constant}.alpha(w, FidelitySpec::power(2));
    DenoiseOptions so = solver;
    so.extra_thresholds.insert(so.extra_thresholds.end(), s_list.begin(), s_list.end());
    DenoiseResult r = denoise(phantom.f, w, rep.alpha, FidelitySpec::power(2), so);

    // S is the centered square; its side is read off the mask extent
    double lo = kInf, hi = -kInf;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (phantom.support[k]) {
            lo = std::min(lo, g.center(k).x);
            hi = std::max(hi, g.center(k).x);
        }
    double side = hi - lo + g.h, x0 = lo - 0.5 * g.h;
    for (double s : s_list) {
        SquareCircleRow row;
        row.s = s;
        BinarySet e = level_set(r, s);
        row.spurious = !(e & ball).empty();
        rep.any_spurious = rep.any_spurious || row.spurious;
        BinarySet oracle = rounded_square_set(g, x0, x0, side, rep.alpha / (1.0 - s));
        row.oracle_empty = oracle.empty();
        row.dh_oracle = boundary_distance(e.minus(ball), oracle);
        rep.rows.push_back(row);
    }
    return rep;
}

ApproximationReport verify_approximation_lemmas(const BinarySet& d, const std::vector<double>& lambdas,
                                                const FamilyOptions& opt) {
    if (d.empty()) throw Error(ErrorCode::EmptyInput, "approximation lemmas: empty set");
    const Grid& g = d.grid();
    ApproximationReport rep;
    rep.limit = 4 * g.h * perimeter(d, opt.scheme);
    rep.convex = convex_hull(d) == d;
    ParametricFamily inner = level_family(d, Direction::Inner, lambdas, opt);
    ParametricFamily outer = level_family(d, Direction::Outer, lambdas, opt);
    const double jitter = g.cell_area();
    for (int k = 0; k < inner.size(); ++k) {
        ApproximationRow row;
        row.lambda = lambdas[k];
        BinarySet di = inner.set(k), doo = outer.set(k);
        row.inner_gap = d.minus(di).area();
        row.outer_gap = doo.minus(d).area();
        row.dh_inner = boundary_distance(di, d);
        row.dh_outer = boundary_distance(doo, d);
        if (!rep.rows.empty()) {
            const auto& prev = rep.rows.back();
            if (row.inner_gap > prev.inner_gap + jitter || row.outer_gap > prev.outer_gap + jitter) {
                rep.monotone = false;
                rep.warnings.push_back("gap increases at lambda " + fmt(row.lambda));
            }
        }
        if (rep.convex) {
            double rb = 2.0 / row.lambda + 2 * g.h;
            if ((!di.empty() && row.dh_inner > rb) || (nontrivial(doo) && row.dh_outer > rb)) {
                rep.rolling_ball = false;
                rep.warnings.push_back("rolling-ball bound fails at lambda " + fmt(row.lambda));
            }
        }
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty())
        rep.reaches_limit = rep.rows.back().inner_gap <= rep.limit && rep.rows.back().outer_gap <= rep.limit;
    return rep;
}

DensityReport verify_density_estimates(const DenoiseResult& r, const BinarySet& d, double delta,
                                       const std::vector<double>& radii, const std::vector<double>& s_list) {
    const Grid& g = d.grid();
    require_same_grid(g, r.u.grid(), "verify_density_estimates");
    if (!(delta > 2 * g.h)) throw Error(ErrorCode::InvalidArgument, "margin must exceed 2h");
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "no radii");
    DensityReport rep;
    rep.far_bound = 2.0 / delta * 1.1;
    ScalarField dist = distance_to_boundary(d);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (dist[k] >= delta) rep.sup_far = std::max(rep.sup_far, std::abs(r.v[k]));
    rep.far_ok = rep.sup_far <= rep.far_bound;
    rep.levels = s_list;
    rep.r_k = radii.back();
    rep.c_k = kInf;
    BoundarySet bd = boundary(d);
    for (double s : s_list) {
        BinarySet e = level_set(r, s);
        double inner = -1.0, outer = -1.0;
        if (nontrivial(e)) {
            BoundarySet be = boundary(e);
            std::vector<std::uint8_t> keep(be.size(), 0);
            std::vector<Point> bp = bd.points();
            for (std::size_t k = 0; k < be.size(); ++k) {
                Point q = be.point(k);
                double best = kInf;
                for (Point p : bp) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
                keep[k] = best >= delta;
            }
            if (std::find(keep.begin(), keep.end(), 1) != keep.end()) {
                DensityProfile prof = density_profile(e, radii, be, keep);
                inner = *std::min_element(prof.inner_min.begin(), prof.inner_min.end());
                outer = *std::min_element(prof.outer_min.begin(), prof.outer_min.end());
            }
        }
        rep.inner_min.push_back(inner);
        rep.outer_min.push_back(outer);
        if (inner >= 0) rep.c_k = std::min(rep.c_k, std::min(inner, outer));
    }
    if (std::isinf(rep.c_k)) rep.c_k = -1.0;
    return rep;
}

double curvature_violation(const DenoiseResult& r, const CurvatureField& kappa, double tol) {
    require_same_grid(r.v.grid(), kappa.grid(), "curvature_violation");
    std::size_t bad = 0;
    for (std::size_t k = 0; k < kappa.size(); ++k)
        if (std::abs(r.v[k]) > std::abs(kappa[k]) + tol) ++bad;
    return static_cast<double>(bad) / static_cast<double>(kappa.size());
}

}  // namespace tvl
