#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "helpers.hpp"
#include "tvl/experiments.hpp"

using namespace tvl;
using namespace tvl::testing;

namespace {

const double kPi = 3.14159265358979323846;

// Digits of index i >= 1: level j has 2^{j-1} strings ending in 1, counted
// in binary on the first j-1 digits.
std::string digits_of(int i) {
    int j = 0;
    while ((1 << (j + 1)) <= i) ++j;
    int m = i - (1 << j);
    std::string d;
    for (int k = j - 1; k >= 0; --k) d += ((m >> k) & 1) ? '1' : '0';
    return d + '1';
}

double value_of(const std::string& d) {
    double a = 0.0, w = 0.5;
    for (char c : d) {
        if (c == '1') a += w;
        w *= 0.5;
    }
    return a;
}

}  // namespace

TEST_CASE("ping-pong phantom structure") {
    Grid g = Grid::square(256, -1.1, 1.1);
    PhantomSpec spec;
    spec.kind = PhantomKind::TruncatedPingpong;
    Phantom p = make_phantom(g, spec);
    REQUIRE(p.balls.size() == 15);
    CHECK(p.values.size() == 16);
    for (std::size_t a = 0; a < p.balls.size(); ++a) {
        const Ball& b = p.balls[a];
        CHECK(std::hypot(b.center.x, b.center.y) + b.radius < 1.0);
        for (std::size_t c = a + 1; c < p.balls.size(); ++c) {
            double d = std::hypot(b.center.x - p.balls[c].center.x, b.center.y - p.balls[c].center.y);
            CHECK(d > b.radius + p.balls[c].radius);
        }
    }
    // values and offset signs rebuilt from the digit strings
    std::vector<int> sign(16, 0);
    sign[0] = 1;
    for (int i = 1; i < 16; ++i) {
        std::string d = digits_of(i);
        std::string parent = d.substr(0, d.size() - 1);
        while (!parent.empty() && parent.back() == '0') parent.pop_back();
        int pi = 0;
        for (int k = 1; k < i; ++k)
            if (digits_of(k) == parent) pi = k;
        sign[i] = -sign[pi];
        CHECK(p.ball_values[i - 1] == doctest::Approx(value_of(d)).epsilon(1e-15));
        CHECK(p.offset_sign[i - 1] == sign[i]);
        CHECK((p.balls[i - 1].center.x > 0) == (sign[i] > 0));
    }
    CHECK(sign[1] == -1);

    double s = pingpong_adversarial_level(4);
    CHECK(s == doctest::Approx(0.3125 - 1.0 / 64));
    int k = pingpong_adversarial_ball(p);
    CHECK(p.ball_values[k] == 0.3125);
    CHECK(ball_removal_distance(p, s, k) > 2 * p.balls[k].radius);
    CHECK_FALSE(p.attains(s));
}

TEST_CASE("phantom validation and levels") {
    Grid g = Grid::square(64, -1.1, 1.1);
    PhantomSpec big;
    big.radius = 1.5;
    CHECK_THROWS_AS(make_phantom(g, big), Error);
    PhantomSpec sq;
    sq.kind = PhantomKind::Square;
    sq.side = 1.6;
    CHECK_THROWS_AS(make_phantom(g, sq), Error);

    PhantomSpec stack;
    stack.kind = PhantomKind::Stack;
    Phantom p = make_phantom(g, stack);
    CHECK(p.values == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(default_levels(p) == std::vector<double>{0.5, 1.5});
    CHECK(p.truth(1.5).area() == doctest::Approx(kPi * 0.09).epsilon(0.05));
    try {
        run_noiseless_convergence(p, {0.1}, {1.0});
        FAIL("attained level accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
    for (PhantomKind k : {PhantomKind::Disk, PhantomKind::Square, PhantomKind::Polygon, PhantomKind::SquarePlusFarBall,
                          PhantomKind::Stack, PhantomKind::TruncatedPingpong}) {
        CHECK(parse_phantom_kind(phantom_kind_name(k)) == k);
        PhantomSpec s;
        s.kind = k;
        Phantom q = make_phantom(g, s);
        for (std::size_t c = 0; c < g.size(); ++c)
            if (q.support[c]) CHECK(std::hypot(g.center(c).x, g.center(c).y) < 1.0);
    }
}

TEST_CASE("noise models are reproducible and supported") {
    Grid g = Grid::square(96, -2.2, 2.2);
    NoiseModel n;
    n.seed = 7;
    n.scale = 0.2;
    ScalarField a = n.realize(g, 2), b = n.realize(g, 2), c = n.realize(g, 3);
    CHECK(a.values() == b.values());
    CHECK(a.values() != c.values());
    NoiseModel other = n;
    other.seed = 8;
    CHECK(other.realize(g, 2).values() != a.values());
    double sigma = n.amplitude(2);
    CHECK(sigma == doctest::Approx(0.05));
    double sum2 = 0.0;
    std::size_t inside = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        Point q = g.center(k);
        CHECK(std::abs(a[k]) <= 4 * sigma);
        if (std::hypot(q.x, q.y) >= 2.0) CHECK(a[k] == 0.0);
        else {
            sum2 += a[k] * a[k];
            ++inside;
        }
    }
    CHECK(std::sqrt(sum2 / inside) == doctest::Approx(sigma).epsilon(0.05));

    NoiseModel bump;
    bump.kind = NoiseKind::ScaledBump;
    bump.scale = 0.3;
    ScalarField wb = bump.realize(Grid::square(65, -2.2, 2.2), 0);
    CHECK(wb.max() == doctest::Approx(0.3));
    CHECK(wb.min() == 0.0);

    NoiseModel far;
    far.kind = NoiseKind::FarIndicator;
    far.scale = 1.0;
    Ball b0 = far.far_ball(0), b2 = far.far_ball(2);
    CHECK(b2.radius == doctest::Approx(b0.radius / 4));
    CHECK((-0.5 - b2.center.x) == doctest::Approx((-0.5 - b0.center.x) / 2));
    CHECK(lp_norm(far.realize(g, 0), 2.0) == doctest::Approx(std::sqrt(kPi) * b0.radius).epsilon(0.1));
    for (NoiseKind k : {NoiseKind::ScaledBump, NoiseKind::IidGaussian, NoiseKind::FarIndicator})
        CHECK(parse_noise_kind(noise_kind_name(k)) == k);
}

TEST_CASE("parameter rules") {
    Grid g = Grid::square(64, -2.2, 2.2);
    NoiseModel n;
    ScalarField w = n.realize(g, 0);
    FidelitySpec psi = FidelitySpec::power(2);
    double norm = lp_norm(w, 2.0);
    ParameterRule hard{RuleKind::Hard, 0.5 * std::sqrt(kPi)};
    CHECK(hard.alpha(w, psi) == doctest::Approx(norm / (0.5 * std::sqrt(kPi))));
    CHECK(hard.satisfied(w, hard.alpha(w, psi), psi));
    CHECK_FALSE(hard.satisfied(w, 0.9 * hard.alpha(w, psi), psi));
    ParameterRule linear{RuleKind::Linear, 0.5};
    CHECK(linear.alpha(w, psi) == doctest::Approx(0.5 * norm));
    ParameterRule easy{RuleKind::Easy, 1.0};
    double ipsi = 0.0;
    for (double x : w.values()) ipsi += 0.5 * x * x * g.cell_area();
    CHECK(easy.alpha(w, psi) == doctest::Approx(ipsi));

    ParameterRule over{RuleKind::Hard, std::sqrt(kPi)};
    try {
        over.validate(psi);
        FAIL("ceiling accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RuleViolation);
    }

    Grid gg = Grid::square(64, -2.2, 2.2);
    Phantom p = make_phantom(gg, {PhantomKind::Square});
    ExperimentOptions o;
    o.alphas = {0.5 * hard.alpha(n.realize(gg, 0), psi)};
    try {
        run_noisy_convergence(p, n, hard, 1, {0.5}, o);
        FAIL("rule violation accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RuleViolation);
    }
    for (RuleKind k : {RuleKind::Hard, RuleKind::Easy, RuleKind::Linear}) CHECK(parse_rule_kind(rule_kind_name(k)) == k);
}

TEST_CASE("noiseless disk run") {
    Grid g = Grid::square(160, -1.1, 1.1);
    Phantom p = make_phantom(g, {PhantomKind::Disk});
    const double r = 0.5;
    auto rep = run_noiseless_convergence(p, {0.2 * r, 0.1 * r, 0.05 * r, 0.025 * r}, {0.25, 0.5, 0.75});
    CHECK(rep.passed);
    REQUIRE(rep.rows.size() == 12);
    for (const auto& row : rep.rows) {
        // u = (1 - 2 alpha / r) on the disk: the level is the disk or empty
        bool present = 1.0 - 2.0 * row.alpha / r > row.s;
        if (present) CHECK(row.dh_boundary <= 1e-12);
        else CHECK(std::isinf(row.dh_boundary));
        CHECK(row.sandwich == 1);
        CHECK(row.curvature_violation == 0.0);
        CHECK(row.spurious == 0);
        CHECK(row.support_radius <= r);
    }
    CHECK(rep.csv().find("step,alpha,s,") == 0);
}

TEST_CASE("noiseless stack and ping-pong runs") {
    Grid g = Grid::square(160, -1.1, 1.1);
    PhantomSpec s;
    s.kind = PhantomKind::Stack;
    Phantom p = make_phantom(g, s);
    ExperimentOptions o;
    o.instrument = false;
    auto rep = run_noiseless_convergence(p, {0.1, 0.05, 0.025, 0.0125}, {0.5, 1.5}, o);
    CHECK(rep.passed);
    CHECK(rep.rows.back().dh_boundary <= 3 * g.h);
    CHECK(rep.rows[rep.rows.size() - 2].dh_boundary <= 3 * g.h);

    Grid gp = Grid::square(256, -1.1, 1.1);
    PhantomSpec ps;
    ps.kind = PhantomKind::TruncatedPingpong;
    Phantom pp = make_phantom(gp, ps);
    double lv = pingpong_adversarial_level(4);
    double sep = ball_removal_distance(pp, lv, pingpong_adversarial_ball(pp));
    auto rp = run_noiseless_convergence(pp, {0.02, 0.01, 0.005, 0.0025}, {lv}, o);
    CHECK_FALSE(rp.passed);
    for (const auto& row : rp.rows) CHECK(row.dh_boundary >= sep);
}

TEST_CASE("noisy square run is reproducible") {
    Grid g = Grid::square(96, -2.2, 2.2);
    Phantom p = make_phantom(g, {PhantomKind::Square});
    NoiseModel n;
    n.seed = 3;
    ParameterRule rule{RuleKind::Hard, 0.5 * std::sqrt(kPi)};
    auto a = run_noisy_convergence(p, n, rule, 4, {0.25, 0.5, 0.75});
    auto b = run_noisy_convergence(p, n, rule, 4, {0.25, 0.5, 0.75});
    CHECK(a.csv() == b.csv());
    REQUIRE(a.rows.size() == 12);
    for (const auto& row : a.rows) {
        CHECK(row.support_radius <= 2.0 + 2 * g.h);
        CHECK(row.noise_norm > 0.0);
    }
    CHECK(a.rows.back().alpha < a.rows.front().alpha);
}

TEST_CASE("square with a far ball") {
    Grid g = Grid::square(192, -1.1, 1.1);
    PhantomSpec s;
    s.kind = PhantomKind::SquarePlusFarBall;
    s.ell = 0.3;
    s.ball_radius = 0.05;
    Phantom p = make_phantom(g, s);
    std::vector<double> levels = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    auto good = run_square_circle(p, 0.5, levels);
    CHECK_FALSE(good.any_spurious);
    for (const auto& row : good.rows) CHECK(row.dh_oracle <= 2 * g.h);
    auto bad = run_square_circle(p, 0.1, levels);
    CHECK(bad.any_spurious);
    for (const auto& row : bad.rows)
        if ((1.0 - row.s) / bad.alpha > 2.0 / s.ball_radius + 2.0) CHECK(row.spurious);
}

TEST_CASE("approximation lemmas") {
    Grid g = Grid::square(192, -1.5, 1.5);
    std::vector<double> lambdas = {2.0, 4.0, 8.0, 16.0, 32.0, 64.0};

    BinarySet disk = rasterize_disk(g, {0, 0}, 0.5);
    auto rd = verify_approximation_lemmas(disk, lambdas);
    CHECK(rd.convex);
    CHECK(rd.monotone);
    CHECK(rd.reaches_limit);
    CHECK(rd.rolling_ball);
    // a few staircase tip cells join only at a larger lambda
    for (const auto& row : rd.rows) {
        if (row.lambda > 2.0 / 0.5 * 1.05) CHECK(row.inner_gap <= 16 * g.cell_area());
        if (row.lambda >= 16.0) CHECK(row.inner_gap == 0.0);
        CHECK(row.outer_gap == 0.0);
    }

    BinarySet sq = rasterize_rect(g, -0.5, -0.5, 0.5, 0.5);
    auto rs = verify_approximation_lemmas(sq, lambdas);
    CHECK(rs.monotone);
    CHECK(rs.reaches_limit);
    CHECK(rs.rolling_ball);
    // corner to rounding arc
    CHECK(std::abs(rs.rows[3].dh_inner - (std::sqrt(2.0) - 1) / 16) <= 2 * g.h);

    BinarySet ell = rasterize_polygon(g, {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.0}, {0.0, 0.0}, {0.0, 0.5}, {-0.5, 0.5}});
    auto rl = verify_approximation_lemmas(ell, lambdas);
    CHECK_FALSE(rl.convex);
    CHECK(rl.monotone);
    CHECK(rl.rows.back().inner_gap < rl.rows.front().inner_gap);
}

TEST_CASE("density estimates and curvature domination") {
    Grid g = Grid::square(192, -1.1, 1.1);
    BinarySet disk = rasterize_disk(g, {0, 0}, 0.5);
    DenoiseOptions o;
    o.extra_thresholds = {0.5};
    for (double alpha : {0.05, 0.1}) {
        auto r = denoise(indicator(disk), alpha, FidelitySpec::power(2), o);
        auto rep = verify_density_estimates(r, disk, 0.1, {0.02, 0.05, 0.1}, {0.5});
        CHECK(rep.far_bound == doctest::Approx(22.0));
        CHECK(rep.far_ok);
        auto kappa = variational_curvature(disk, default_lambdas(g));
        CHECK(curvature_violation(r, kappa.kappa, 1e-6) == 0.0);
    }

    BinarySet sq = rasterize_rect(g, -0.5, -0.5, 0.5, 0.5);
    for (double alpha : {0.1, 0.05, 0.025}) {
        auto r = denoise(indicator(sq), alpha, FidelitySpec::power(2), o);
        auto rep = verify_density_estimates(r, sq, 0.05, {0.02, 0.04, 0.06, 0.08, 0.1}, {0.5});
        CHECK(rep.far_ok);
        REQUIRE(rep.inner_min.size() == 1);
        if (rep.inner_min[0] >= 0) {
            CHECK(rep.inner_min[0] >= 0.2);
            CHECK(rep.outer_min[0] >= 0.2);
        }
    }
    CHECK_THROWS_AS(verify_density_estimates(denoise(indicator(sq), 0.1, FidelitySpec::power(2)), sq, g.h, {0.02}, {0.5}),
                    Error);
}
