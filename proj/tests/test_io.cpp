#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "tvl/cli.hpp"
#include "tvl/io.hpp"

using namespace tvl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "tvl_io_test";
    fs::create_directories(d);
    return d / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << s;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::Usage;
}

struct Run {
    int rc = 0;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tvl");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.rc = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace

TEST_CASE("f64 rasters round trip bit-exactly") {
    Grid g(37, 23, 0.0137, {-0.2, 0.4});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    ScalarField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) f[k] = u(rng);
    f[0] = -0.0;
    f[1] = std::numeric_limits<double>::denorm_min();
    std::string p = scratch("rt.f64").string();
    save_field(p, f);
    ScalarField back = load_image(p);
    CHECK(back.grid() == g);
    CHECK(std::memcmp(back.values().data(), f.values().data(), g.size() * sizeof(double)) == 0);
    RasterHeader hdr = read_sidecar(p);
    CHECK(hdr.format == RasterFormat::F64Field);
    CHECK(hdr.vmax == f.max());

    // sidecar disagreeing with the raster size
    RasterHeader wrong = hdr;
    wrong.nx = 36;
    write_sidecar(p, wrong);
    CHECK(code_of([&] { load_image(p); }) == ErrorCode::GridMismatch);
}

TEST_CASE("PGM loading") {
    std::string zero = "P5\n4 3\n255\n" + std::string(12, '\0');
    fs::path pz = scratch("zero.pgm");
    spit(pz, zero);
    fs::remove(pz.string() + ".json");
    ScalarField z = load_image(pz.string());
    CHECK(z.grid().nx == 4);
    CHECK(z.grid().ny == 3);
    CHECK(z.grid().h == doctest::Approx(0.25));
    CHECK(z.max() == 0.0);

    // ascii variant, comments, top row first, threshold at 128
    fs::path pa = scratch("ascii.pgm");
    spit(pa, "P2\n# comment\n3 2\n255\n0 127 128\n255 10 200\n");
    fs::remove(pa.string() + ".json");
    ScalarField a = load_image(pa.string());
    CHECK(a[a.grid().index(1, 1)] == doctest::Approx(127.0 / 255.0));
    CHECK(a[a.grid().index(0, 0)] == 1.0);
    BinarySet m = load_mask(pa.string());
    CHECK_FALSE(m.at(1, 1));
    CHECK(m.at(2, 1));
    CHECK(m.at(0, 0));
    CHECK(m.at(2, 0));
    CHECK(m.count() == 3);

    fs::path bad = scratch("bad.pgm");
    spit(bad, "P5\n4 x\n255\n");
    CHECK(code_of([&] { load_image(bad.string()); }) == ErrorCode::FormatError);
    spit(bad, "P5\n4 4\n255\nabc");
    CHECK(code_of([&] { load_image(bad.string()); }) == ErrorCode::FormatError);
    CHECK(code_of([&] { load_image(scratch("missing.pgm").string()); }) == ErrorCode::IoError);

    // disk mask through save and load
    Grid g = Grid::square(200, -1, 1);
    const double r = 0.6;
    BinarySet disk = rasterize_disk(g, {0.1, -0.05}, r);
    std::string pd = scratch("disk.pgm").string();
    save_mask(pd, disk);
    BinarySet back = load_mask(pd);
    CHECK(back == disk);
    CHECK(back.grid() == g);
    CHECK(std::abs(back.area() - 3.14159265358979 * r * r) <= g.h * 2 * 3.14159265358979 * r);

    RasterHeader hdr = read_sidecar(pd);
    hdr.ny = 199;
    write_sidecar(pd, hdr);
    CHECK(code_of([&] { load_mask(pd); }) == ErrorCode::GridMismatch);
    spit(pd + ".json", "{ not json");
    CHECK(code_of([&] { load_mask(pd); }) == ErrorCode::FormatError);
}

TEST_CASE("SVG overlays") {
    Grid g = Grid::square(64, -0.2, 1.2);
    BinarySet sq = rasterize_rect(g, 0, 0, 1, 1);
    std::string p = scratch("same.svg").string();
    render_overlay(boundary(sq), boundary(sq), p);
    std::string svg = slurp(p);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("id=\"truth\"") != std::string::npos);
    CHECK(svg.find("id=\"computed\"") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t a = svg.find("id=\"truth\""), b = svg.find("id=\"computed\"");
    std::string dt = svg.substr(svg.find(" d=\"", a), svg.find("\"/>", a) - svg.find(" d=\"", a));
    std::string dc = svg.substr(svg.find(" d=\"", b), svg.find("\"/>", b) - svg.find(" d=\"", b));
    CHECK(dt == dc);

    BinarySet rounded = testing::rounded_square(g, 0, 0, 1, 1.0 / 8);
    render_overlay(boundary(sq), boundary(rounded), scratch("corner.svg").string());
    CHECK(hausdorff(boundary(sq), boundary(rounded)) == doctest::Approx((std::sqrt(2.0) - 1) / 8).epsilon(0.15));

    CHECK(code_of([&] { render_overlay(boundary(sq), BoundarySet{}, p); }) == ErrorCode::EmptyInput);
}

TEST_CASE("run config parsing and round trip") {
    const char* text = R"(
seed = 9
[grid]
n = 128
extent = 2.2
[phantom]
kind = "square"
side = 1.0
[noise]
kind = "iid_gaussian"
scale = 0.05
decay = 0.5
[rule]
kind = "hard"
constant = 0.8
[solver]
backend = "cut"
levels = 512
p = 1.5
[experiment]
mode = "noisy"
steps = 3
levels = [0.25, 0.5, 0.75]
[output]
dir = "runs/a"
masks = false
)";
    RunConfig c = parse_run_config(text);
    CHECK(c.seed == 9);
    CHECK(c.noise.seed == 9);
    CHECK(c.grid.n == 128);
    CHECK(c.phantom.kind == PhantomKind::Square);
    CHECK(c.solver.backend == Backend::LevelwiseCut);
    CHECK(c.solver.p == 1.5);
    CHECK(c.experiment.mode == ExperimentMode::Noisy);
    CHECK(c.experiment.levels == std::vector<double>{0.25, 0.5, 0.75});
    CHECK_FALSE(c.output.masks);
    RunConfig back = parse_run_config(serialize_run_config(c));
    CHECK(back == c);

    RunConfig d;
    d.phantom.polygon = {{0.1, 0.2}, {0.3, -0.4}, {-0.1, 0.0}};
    d.phantom.stack_radii = {0.7, 0.2};
    d.experiment.alphas = {0.1 / 3, 1e-3};
    d.solver.exterior = -0.3;
    CHECK(parse_run_config(serialize_run_config(d)) == d);

    CHECK(code_of([] { parse_run_config("[grid]\nnn = 3\n"); }) == ErrorCode::FormatError);
    CHECK(code_of([] { parse_run_config("colour = 1\n"); }) == ErrorCode::FormatError);
    CHECK(code_of([] { parse_run_config("[grid]\nn = \"big\"\n"); }) == ErrorCode::FormatError);
    CHECK(code_of([] { parse_run_config("[grid\n"); }) == ErrorCode::FormatError);
    CHECK(code_of([] { parse_run_config("[solver]\np = 2.5\n"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_run_config("[experiment]\nalphas = [0.1, -0.1]\n"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_run_config("[grid]\nextent = 0.4\n[phantom]\nradius = 0.5\n"); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_run_config("[experiment]\nmode = \"noisy\"\n[rule]\nconstant = 1.8\n"); }) ==
          ErrorCode::RuleViolation);
    CHECK(code_of([] { parse_run_config("[phantom]\nkind = \"blob\"\n"); }) == ErrorCode::FormatError);
}

TEST_CASE("command line") {
    Run v = cli({"--version"});
    CHECK(v.rc == 0);
    CHECK(v.out.find("tvl ") == 0);
    CHECK(cli({"--help"}).rc == 0);
    CHECK(cli({"denoise", "--help"}).rc == 0);
    Run none = cli({});
    CHECK(none.rc == 2);
    CHECK(none.err.rfind("ERROR Usage:", 0) == 0);
    CHECK(cli({"denoise", "--input"}).rc == 2);

    Run missing = cli({"cheeger", "--input", scratch("nothing_here.pgm").string()});
    CHECK(missing.rc == 2);
    CHECK(missing.err.rfind("ERROR IoError:", 0) == 0);

    Grid g = Grid::square(128, -0.14, 1.14);
    std::string sq = scratch("square.pgm").string();
    save_mask(sq, rasterize_rect(g, 0, 0, 1, 1));
    std::string cs = scratch("cs.pgm").string();
    Run ch = cli({"cheeger", "--input", sq, "--tol", "1e-3", "--output", cs});
    CHECK(ch.rc == 0);
    REQUIRE(ch.out.rfind("h ", 0) == 0);
    double h = std::stod(ch.out.substr(2));
    CHECK(h == doctest::Approx(2 + std::sqrt(3.14159265358979)).epsilon(0.03));
    CHECK(load_mask(cs).subset_of(load_mask(sq)));

    Run hd = cli({"hausdorff", "--a", sq, "--b", sq, "--boundary"});
    CHECK(hd.rc == 0);
    CHECK(hd.out == "0\n");
    std::string empty = scratch("empty.pgm").string();
    save_mask(empty, BinarySet(g));
    Run he = cli({"hausdorff", "--a", sq, "--b", empty, "--boundary", "--overlay", scratch("e.svg").string()});
    CHECK(he.rc == 2);
    CHECK(he.err.rfind("ERROR EmptyInput:", 0) == 0);

    std::string u = scratch("u.f64").string(), e = scratch("e.pgm").string();
    Run dn = cli({"denoise", "--input", sq, "--alpha", "0.05", "--output", u, "--mask-out", e, "--level", "0.5"});
    CHECK(dn.rc == 0);
    CHECK(load_image(u).max() == doctest::Approx(1.0 - 0.05 * (2 + std::sqrt(3.14159265358979))).epsilon(0.02));
    CHECK(cli({"denoise", "--input", sq, "--alpha", "-1"}).rc == 2);
    CHECK(cli({"denoise", "--input", sq, "--alpha", "0.1", "--p", "3"}).rc == 2);

    std::string kappa = scratch("kappa.f64").string();
    Run cv = cli({"curvature", "--input", sq, "--lambdas", "24", "--inner-only", "--output", kappa});
    CHECK(cv.rc == 0);
    CHECK(load_image(kappa).grid() == g);
}

TEST_CASE("experiment runs are deterministic") {
    std::string cfg = scratch("noisy.toml").string();
    spit(cfg, R"(
[grid]
n = 64
extent = 2.2
[phantom]
kind = "square"
[noise]
kind = "iid_gaussian"
scale = 0.1
[rule]
kind = "hard"
constant = 0.886
[experiment]
mode = "noisy"
steps = 3
[output]
overlays = true
)");
    std::string d1 = scratch("run1").string(), d2 = scratch("run2").string(), d3 = scratch("run3").string();
    Run a = cli({"--seed", "4", "experiment", "--config", cfg, "--output-dir", d1});
    Run b = cli({"--seed", "4", "experiment", "--config", cfg, "--output-dir", d2});
    Run c = cli({"--seed", "5", "experiment", "--config", cfg, "--output-dir", d3});
    CHECK((a.rc == 0 || a.rc == 1));
    CHECK(a.rc == b.rc);
    CHECK(slurp(fs::path(d1) / "report.csv") == slurp(fs::path(d2) / "report.csv"));
    CHECK(slurp(fs::path(d1) / "report.csv") != slurp(fs::path(d3) / "report.csv"));
    for (const auto& entry : fs::directory_iterator(d1))
        if (entry.path().extension() == ".pgm")
            CHECK(slurp(entry.path()) == slurp(fs::path(d2) / entry.path().filename()));

    std::string sc = scratch("sc.toml").string();
    spit(sc, R"(
[grid]
n = 128
extent = 1.1
[phantom]
kind = "square_plus_far_ball"
ell = 0.3
ball_radius = 0.05
[rule]
kind = "linear"
constant = 0.5
[experiment]
mode = "square_circle"
levels = [0.1, 0.3, 0.5, 0.7, 0.9]
)");
    Run s = cli({"experiment", "--config", sc, "--output-dir", scratch("sc").string()});
    CHECK(s.rc == 0);
    CHECK(s.out.find("spurious 0") != std::string::npos);
    CHECK(cli({"experiment", "--config", scratch("absent.toml").string()}).rc == 2);
}
