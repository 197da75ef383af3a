#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "tvl/curvature.hpp"
#include "tvl/maxflow.hpp"
#include "tvl/push_relabel.hpp"

using namespace tvl;
using namespace tvl::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kCheegerSquare = 2.0 + std::sqrt(kPi);

struct Brute {
    double energy;
    BinarySet minimal, maximal;
};

// Enumerates every subset of the allowed cells of a tiny grid.
Brute brute_force(const ScalarField& kappa, const Constraint& c, const PerimeterScheme& s, Border border) {
    const Grid& g = kappa.grid();
    std::vector<std::size_t> cells;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (c.allows(k)) cells.push_back(k);
    const std::size_t m = cells.size();
    double best = 1e300;
    std::vector<BinarySet> argmin;
    for (std::uint64_t bits = 0; bits < (1ull << m); ++bits) {
        BinarySet e(g);
        for (std::size_t t = 0; t < m; ++t)
            if (bits >> t & 1) e.set(cells[t], true);
        double en = pmc_energy(e, kappa, s, border);
        if (en < best - 1e-12) {
            best = en;
            argmin.clear();
        }
        if (en <= best + 1e-12) argmin.push_back(e);
    }
    Brute b{best, argmin[0], argmin[0]};
    for (const auto& e : argmin) {
        b.minimal = b.minimal & e;
        b.maximal = b.maximal | e;
    }
    return b;
}

}  // namespace

TEST_CASE("push-relabel and Boykov-Kolmogorov agree on random networks") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 80; ++t) {
        int n = t < 40 ? 2 + t % 5 : t - 10;
        MaxFlow bk(n);
        PushRelabel pr(n);
        for (int i = 0; i < n; ++i) {
            double a = u(rng) < 0.5 ? u(rng) : 0.0, b = u(rng) < 0.5 ? u(rng) : 0.0;
            bk.add_tweights(i, a, b);
            pr.add_tweights(i, a, b);
        }
        for (int e = 0; e < 3 * n; ++e) {
            int i = static_cast<int>(u(rng) * n), j = static_cast<int>(u(rng) * n);
            if (i == j) continue;
            double c = u(rng), r = u(rng) < 0.3 ? 0.0 : u(rng);
            bk.add_edge(i, j, c, r);
            pr.add_edge(i, j, c, r);
        }
        double f1 = bk.solve(), f2 = pr.solve();
        CHECK(f1 == doctest::Approx(f2).epsilon(1e-10));
        CHECK(bk.sink_reaching(1e-12) == pr.sink_reaching(1e-12));
    }
}

TEST_CASE("push-relabel on chains whose only sink path visits every node") {
    for (int n = 1; n <= 6; ++n) {
        MaxFlow bk(n);
        PushRelabel pr(n);
        bk.add_tweights(0, 1.0, 0.0);
        pr.add_tweights(0, 1.0, 0.0);
        bk.add_tweights(n - 1, 0.0, 0.7);
        pr.add_tweights(n - 1, 0.0, 0.7);
        for (int i = 0; i + 1 < n; ++i) {
            bk.add_edge(i, i + 1, 0.9, 0.9);
            pr.add_edge(i, i + 1, 0.9, 0.9);
        }
        double f1 = bk.solve(), f2 = pr.solve();
        CHECK(f1 == doctest::Approx(0.7));
        CHECK(f2 == doctest::Approx(f1));
        CHECK(bk.sink_reaching(1e-12) == pr.sink_reaching(1e-12));
    }
}

TEST_CASE("cuts match exhaustive enumeration on tiny grids") {
    Grid g(4, 4, 0.25, {0.125, 0.125});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-40.0, 60.0);
    for (int n : {4, 8, 16}) {
        auto s = PerimeterScheme::make(n);
        for (int t = 0; t < 6; ++t) {
            ScalarField kappa(g);
            // coarse values make ties likely
            for (std::size_t k = 0; k < g.size(); ++k) kappa[k] = std::round(u(rng) / 10) * 10;
            for (Border b : {Border::Outside, Border::Free}) {
                auto ref = brute_force(kappa, Constraint::none(), s, b);
                auto mx = minimize_pmc(kappa, Constraint::none(), Select::Maximal, s, b);
                auto mn = minimize_pmc(kappa, Constraint::none(), Select::Minimal, s, b);
                CHECK(mx.energy == doctest::Approx(ref.energy).epsilon(1e-12));
                CHECK(mx.set == ref.maximal);
                CHECK(mn.set == ref.minimal);
            }
            BinarySet d = testing::random_mask(g, rng, 0.6);
            auto ref = brute_force(kappa, Constraint::inside(d), s, Border::Outside);
            auto mx = minimize_pmc(kappa, Constraint::inside(d), Select::Maximal, s);
            CHECK(mx.set == ref.maximal);
            CHECK(mx.set.subset_of(d));
            auto refo = brute_force(kappa, Constraint::outside(d), s, Border::Outside);
            auto mxo = minimize_pmc(kappa, Constraint::outside(d), Select::Maximal, s);
            CHECK(mxo.set == refo.maximal);
        }
    }
}

TEST_CASE("nested solves agree with independent solves") {
    Grid g = Grid::square(40, 0.0, 1.0);
    std::mt19937_64 rng(8);
    ScalarField base(g);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t k = 0; k < g.size(); ++k) base[k] = u(rng);
    std::vector<double> ts;
    for (int k = 0; k < 23; ++k) ts.push_back(-1.0 + 2.0 * k / 22.0);
    GridCutter cutter(g, default_scheme());
    std::vector<std::size_t> cells(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) cells[k] = k;
    double c = 30.0 * g.h * g.h;
    // thresholds of v on a field: decreasing family
    NestedProblem p{static_cast<int>(ts.size()), false,
                    [&](int k, std::size_t q) { return c * (ts[k] - base[q]); },
                    [](int) { return Border::Outside; }};
    auto rank = solve_nested(cutter, p, cells, std::vector<std::uint8_t>(g.size(), 0));
    for (int k = 0; k < p.count; ++k) {
        std::vector<double> un(g.size());
        for (std::size_t q = 0; q < g.size(); ++q) un[q] = p.unary(k, q);
        auto in = cutter.solve(cells, un, std::vector<std::uint8_t>(g.size(), 0), Border::Outside, Select::Maximal);
        for (std::size_t q = 0; q < g.size(); ++q) CHECK((in[q] != 0) == (k < rank[q]));
    }
}

TEST_CASE("minimize_pmc examples") {
    Grid g = Grid::square(200, -0.1, 1.1);
    BinarySet sq = rasterize_rect(g, 0.0, 0.0, 1.0, 1.0);

    SUBCASE("constant curvature below the Cheeger constant gives the empty set") {
        auto r = minimize_pmc(ScalarField(g, 2.0), Constraint::inside(sq), Select::Maximal);
        CHECK(r.set.empty());
        CHECK(r.energy == 0.0);
    }
    SUBCASE("curvature 8 inside the square rounds its corners at radius 1/8") {
        auto r = minimize_pmc(ScalarField(g, 8.0), Constraint::inside(sq), Select::Maximal);
        BinarySet oracle = rounded_square(g, 0.0, 0.0, 1.0, 1.0 / 8);
        CHECK(symmetric_difference_area(r.set, oracle) <= 4 * g.h * 4.0);
        CHECK(symmetric_difference_area(r.set, oracle) <= 0.2 * (sq.area() - oracle.area()));
        CHECK(hausdorff(boundary(r.set), boundary(oracle)) <= 2 * g.h);
        CHECK(r.energy == doctest::Approx(pmc_energy(r.set, ScalarField(g, 8.0))));
    }
    SUBCASE("ball with its own curvature") {
        Point c{0.5, 0.5};
        double rad = 0.25;
        BinarySet ball = rasterize_disk(g, c, rad);
        ScalarField kappa(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            Point p = g.center(k);
            double d = std::hypot(p.x - c.x, p.y - c.y);
            kappa[k] = ball[k] ? 2.0 / rad : -2.0 / std::max(d, rad);
        }
        auto r = minimize_pmc(kappa, Constraint::none(), Select::Maximal);
        // the discrete ball is critical up to metrication, so allow one ring of cells
        CHECK(symmetric_difference_area(r.set, ball) <= 2 * g.h * perimeter(ball));
        CHECK(r.energy <= 0.0);
        CHECK(std::abs(pmc_energy(ball, kappa)) <= 0.02 * perimeter(ball));
        ScalarField up = kappa;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (ball[k]) up[k] *= 1.05;
        auto ru = minimize_pmc(up, Constraint::none(), Select::Maximal);
        CHECK(symmetric_difference_area(ru.set, ball) <= 0.5 * g.h * perimeter(ball));
    }
    SUBCASE("grid mismatch and bad input") {
        Grid other = Grid::square(50, 0.0, 1.0);
        CHECK_THROWS_AS(minimize_pmc(ScalarField(g, 1.0), Constraint::inside(BinarySet(other)), Select::Maximal),
                        Error);
        ScalarField bad(g, 1.0);
        bad[3] = std::nan("");
        CHECK_THROWS_AS(minimize_pmc(bad, Constraint::none(), Select::Maximal), Error);
    }
    SUBCASE("exterior counted as inside can run away") {
        CHECK_THROWS_AS(minimize_pmc(ScalarField(g, 50.0), Constraint::none(), Select::Maximal, default_scheme(),
                                     Border::Inside),
                        Error);
    }
}

TEST_CASE("lattice property and comparison") {
    Grid g = Grid::square(48, 0.0, 1.0);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        BinarySet blobs = testing::random_blobs(g, rng, 3, 0.08, 0.2, 0.02);
        ScalarField kappa(g);
        for (std::size_t k = 0; k < g.size(); ++k) kappa[k] = blobs[k] ? 14.0 + (k % 3) : -4.0;
        auto mn = minimize_pmc(kappa, Constraint::none(), Select::Minimal);
        auto mx = minimize_pmc(kappa, Constraint::none(), Select::Maximal);
        CHECK(mn.set.subset_of(mx.set));
        double opt = mx.energy;
        CHECK(mn.energy == doctest::Approx(opt).epsilon(1e-12));
        // any other minimizer from a different tie break still forms a lattice with these
        BinarySet d = testing::random_mask(g, rng, 0.5);
        for (const BinarySet& e : {mn.set & mx.set, mn.set | mx.set})
            CHECK(pmc_energy(e, kappa) == doctest::Approx(opt).epsilon(1e-12));
        // comparison: a pointwise smaller field has smaller maximal minimizer
        ScalarField lower = kappa;
        for (std::size_t k = 0; k < g.size(); ++k) lower[k] -= 0.5 + d[k];
        auto lo = minimize_pmc(lower, Constraint::none(), Select::Maximal);
        CHECK(lo.set.subset_of(mn.set));
    }
}

TEST_CASE("inner family of a disk") {
    Grid g = Grid::square(160, 0.0, 1.0);
    double r = 0.25;
    BinarySet disk = rasterize_disk(g, {0.5, 0.5}, r);
    auto lambdas = geometric_lambdas(2.0, 40.0, 48);
    auto fam = level_family(disk, Direction::Inner, lambdas, {.verify = true});
    double step = lambdas[1] / lambdas[0];
    for (int k = 0; k < fam.size(); ++k) {
        BinarySet e = fam.set(k);
        CHECK(e.subset_of(disk));
        if (k > 0) CHECK(fam.set(k - 1).subset_of(e));
        if (lambdas[k] < 2 / r / step) CHECK(e.empty());
        if (lambdas[k] > 2 / r * step) CHECK(e == disk);
    }
}

TEST_CASE("outer family of a square") {
    Grid g = Grid::square(128, -1.0, 2.0);
    BinarySet sq = rasterize_rect(g, 0.0, 0.0, 1.0, 1.0);
    auto lambdas = geometric_lambdas(0.05, 60.0, 40);
    auto fam = level_family(sq, Direction::Outer, lambdas, {.verify = true});
    Normalization nz = normalization(sq);
    ScalarField gd = density_field(g, nz, {});
    double dens = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!sq[k]) dens += gd[k] * g.cell_area();
    double bound = perimeter(sq) / dens;
    int first = fam.size();
    for (int k = 0; k < fam.size(); ++k) {
        BinarySet dm = fam.set(k);
        CHECK(sq.subset_of(dm));
        if (k > 0) CHECK(dm.subset_of(fam.set(k - 1)));
        if (first == fam.size() && !fam.minimizer(k).empty()) first = k;
    }
    REQUIRE(first < fam.size());
    CHECK(first > 0);
    CHECK(fam.set(0).full());
    // the breakpoint lies in (lambdas[first - 1], lambdas[first]]
    CHECK(lambdas[first - 1] < bound);
    // D^{-lambda} shrinks to D as lambda grows
    CHECK(symmetric_difference_area(fam.set(fam.size() - 1), sq) <= 4 * g.h * perimeter(sq));

    SUBCASE("the grid must hold B(c, 2q)") {
        Grid small = Grid::square(64, -0.2, 1.2);
        CHECK_THROWS_AS(level_family(rasterize_rect(small, 0, 0, 1, 1), Direction::Outer, lambdas), Error);
        CHECK_NOTHROW(level_family(rasterize_rect(small, 0, 0, 1, 1), Direction::Inner, lambdas));
    }
    SUBCASE("the far density value does not matter once confined") {
        FamilyOptions other;
        other.density.g_far = 0.9;
        auto fam2 = level_family(sq, Direction::Outer, lambdas, other);
        for (int k = 0; k < fam.size(); ++k)
            if (lambdas[k] * nz.radius > 4.0) CHECK(fam.set(k) == fam2.set(k));
        bool differs = false;
        for (int k = 0; k < fam.size(); ++k) differs = differs || fam.set(k) != fam2.set(k);
        CHECK(differs);
        // confinement agrees with the unconfined truncated problem above the threshold
        FamilyOptions free_opt;
        free_opt.confine = false;
        auto fam3 = level_family(sq, Direction::Outer, lambdas, free_opt);
        for (int k = 0; k < fam.size(); ++k)
            if (lambdas[k] * nz.radius > 4.0) CHECK(fam.set(k) == fam3.set(k));
    }
}

TEST_CASE("variational curvature of a disk and of the square") {
    SUBCASE("disk") {
        Grid g = Grid::square(128, 0.0, 1.0);
        double r = 0.25;
        BinarySet disk = rasterize_disk(g, {0.5, 0.5}, r);
        auto lambdas = default_lambdas(g);
        auto vc = variational_curvature(disk, lambdas);
        CHECK(vc.uncaptured.empty());
        std::size_t good = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (disk[k]) {
                CHECK(vc.kappa[k] > 0);
                if (vc.kappa[k] >= 8.0 / vc.max_ratio && vc.kappa[k] <= 8.0 * vc.max_ratio) ++good;
            } else {
                CHECK(vc.kappa[k] < 0);
            }
        }
        CHECK(good >= 0.95 * disk.count());
    }
    SUBCASE("square, inner values") {
        Grid g = Grid::square(192, -0.1, 1.1);
        BinarySet sq = rasterize_rect(g, 0.0, 0.0, 1.0, 1.0);
        auto lambdas = geometric_lambdas(1.0, 4.0 / g.h, 160);
        CurvatureOptions opt;
        opt.outer = false;
        auto vc = variational_curvature(sq, lambdas, opt);
        CHECK(vc.uncaptured.empty());
        auto ch = cheeger(sq);
        double kmin = 1e300;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (sq[k]) kmin = std::min(kmin, vc.kappa[k]);
        CHECK(kmin >= ch.h / vc.max_ratio);
        // probes against the closed form, away from the grid scale
        for (Point p : {Point{0.1, 0.1}, Point{0.15, 0.05}, Point{0.5, 0.5}, Point{0.2, 0.3}}) {
            int i = static_cast<int>(std::floor((p.x - g.xmin()) / g.h));
            int j = static_cast<int>(std::floor((p.y - g.ymin()) / g.h));
            double got = vc.kappa[g.index(i, j)];
            CHECK(std::abs(got / kappa_square(p.x, p.y) - 1.0) <= 0.05);
        }
    }
    SUBCASE("convex set, far exterior shares one breakpoint") {
        Grid g = Grid::square(96, -1.0, 2.0);
        BinarySet d = rasterize_disk(g, {0.5, 0.5}, 0.4);
        auto lambdas = geometric_lambdas(0.1, 20.0, 48);
        auto fam = level_family(d, Direction::Outer, lambdas);
        auto vc = variational_curvature(d, lambdas);
        Normalization nz = normalization(d);
        ScalarField gd = density_field(g, nz, {});
        int first = fam.size();
        for (std::size_t k = 0; k < g.size(); ++k) first = std::min(first, fam.entry[k]);
        REQUIRE(first < fam.size());
        BinarySet hull = convex_hull(d);
        std::size_t far = 0, same = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (hull[k]) continue;
            Point p = g.center(k);
            if (std::hypot(p.x - 0.5, p.y - 0.5) < 0.4 + 0.1) continue;
            ++far;
            if (vc.kappa[k] == doctest::Approx(-lambdas[first] * gd[k])) ++same;
        }
        CHECK(same == far);
    }
}

TEST_CASE("monotone capture bound") {
    Grid g = Grid::square(128, 0.0, 1.0);
    BinarySet d = rasterize_polygon(g, {{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.5}, {0.5, 0.5}, {0.5, 0.9}, {0.1, 0.9}});
    auto lambdas = geometric_lambdas(1.0, 4.0 / g.h, 96);
    auto fam = level_family(d, Direction::Inner, lambdas);
    ScalarField dist = distance_to_boundary(d);
    double ratio = lambdas[1] / lambdas[0];
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!d[k] || dist[k] < 4 * g.h) continue;
        REQUIRE(fam.entry[k] < fam.size());
        // balls are only 1.5% off their continuum curvature in the cut metric
        CHECK(lambdas[fam.entry[k]] <= 2.0 / (dist[k] - 1.5 * g.h) * 1.02 * ratio);
    }
}

TEST_CASE("Cheeger sets") {
    SUBCASE("square") {
        Grid g = Grid::square(256, -0.14, 1.14);
        BinarySet sq = rasterize_rect(g, 0.0, 0.0, 1.0, 1.0);
        auto c = cheeger(sq);
        CHECK(std::abs(c.h / kCheegerSquare - 1.0) <= 0.03);
        CHECK(perimeter(c.set) / c.set.area() == doctest::Approx(c.h).epsilon(1e-9));
        BinarySet oracle = rounded_square(g, 0.0, 0.0, 1.0, 1.0 / kCheegerSquare);
        CHECK(symmetric_difference_area(c.set, oracle) <= 4 * g.h * 4.0);
    }
    SUBCASE("disk and two disjoint disks") {
        Grid g = Grid::square(200, 0.0, 1.0);
        double r = 0.2;
        BinarySet one = rasterize_disk(g, {0.3, 0.5}, r);
        auto c1 = cheeger(one);
        CHECK(std::abs(c1.h * r / 2.0 - 1.0) <= 0.03);
        CHECK(c1.set == one);
        BinarySet two = one | rasterize_disk(g, {0.3 + 0.41, 0.5}, r);
        auto c2 = cheeger(two);
        CHECK(c2.h == doctest::Approx(c1.h).epsilon(1e-9));
        CHECK(c2.set == two);
    }
    CHECK_THROWS_AS(cheeger(BinarySet(Grid::square(8, 0.0, 1.0))), Error);
}

TEST_CASE("relaxed backend agrees with the cut") {
    Grid g = Grid::square(40, 0.0, 1.0);
    std::mt19937_64 rng(33);
    for (int t = 0; t < 4; ++t) {
        BinarySet blobs = testing::random_blobs(g, rng, 2, 0.1, 0.25, 0.03);
        ScalarField kappa(g);
        for (std::size_t k = 0; k < g.size(); ++k) kappa[k] = blobs[k] ? 13.0 + 2.0 * t : -3.0;
        for (const Constraint& c : {Constraint::none(), Constraint::inside(blobs)}) {
            auto cut = minimize_pmc(kappa, c, Select::Maximal);
            auto rel = minimize_pmc_relaxed(kappa, c, {.gap_tolerance = 1e-9});
            CHECK(rel.gap >= -1e-12);
            CHECK(std::abs(rel.energy - cut.energy) <= 1e-4 * std::abs(cut.energy) + 1e-12);
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (std::abs(rel.u[k] - 0.5) <= 1e-3) continue;
                CHECK(rel.set[k] == cut.set[k]);
            }
        }
    }
}

TEST_CASE("curvature inequality checker") {
    Grid g = Grid::square(128, -0.1, 1.1);
    auto zero = check_curvature_inequality(ScalarField(g), 0.1, 0.2, 50);
    CHECK(zero.ratio_plus == 0.0);
    CHECK(zero.passes);

    // square curvature from the closed form
    BinarySet sq = rasterize_rect(g, 0.0, 0.0, 1.0, 1.0);
    ScalarField ks(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!sq[k]) continue;
        Point p = g.center(k);
        double x = std::min(p.x, 1 - p.x), y = std::min(p.y, 1 - p.y);
        ks[k] = kappa_square(x, y);
    }
    auto rs = check_curvature_inequality(ks, 0.5, 0.1, 300, 5);
    CHECK(rs.passes);
    CHECK(rs.ratio_plus <= 0.5);

    // spike: a ball of radius rho carrying c gives c rho / 2
    ScalarField spike(g);
    double rho = 0.05, c = 40.0;
    BinarySet b = rasterize_disk(g, {0.5, 0.5}, rho);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (b[k]) spike[k] = c;
    auto sp = check_curvature_inequality(spike, 0.5, 0.1, 300, 5);
    CHECK_FALSE(sp.passes);
    CHECK(sp.ratio_plus >= 0.5);
    CHECK(sp.ratio_plus <= c * rho / 2 * 1.1);
}
