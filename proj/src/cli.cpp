#include "tvl/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tvl/io.hpp"

namespace tvl {

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::UnboundedBelow:
        case ErrorCode::NonConvergence:
        case ErrorCode::NestednessViolation:
        case ErrorCode::EmptyLevelSet:
            return 1;
        default:
            return 2;
    }
}

namespace {

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

std::string level_tag(double s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << s;
    std::string t = os.str();
    for (char& c : t)
        if (c == '.') c = 'p';
        else if (c == '-') c = 'm';
    return t;
}

struct DenoiseArgs {
    std::string input, noise, output, mask_out, backend = "levelwise_cut";
    double alpha = 0.0, p = 2.0, level = 0.5, noise_sigma = 0.0, exterior = 0.0;
    int levels = 256;
    bool verify = false;
};

int run_denoise(const DenoiseArgs& a, std::uint64_t seed, std::ostream& out) {
    ScalarField f = load_image(a.input);
    ScalarField w(f.grid());
    if (!a.noise.empty()) {
        w = load_image(a.noise);
        require_same_grid(f.grid(), w.grid(), "denoise noise");
    }
    if (a.noise_sigma > 0) {
        NoiseModel n;
        n.seed = seed;
        n.scale = a.noise_sigma;
        n.support = 1e300;
        w = w + n.realize(f.grid(), 0);
    }
    if (!(a.alpha > 0)) throw Error(ErrorCode::InvalidArgument, "--alpha must be positive");
    DenoiseOptions o;
    o.backend = parse_backend(a.backend);
    o.levels = a.levels;
    o.exterior = a.exterior;
    o.verify = a.verify;
    if (!a.mask_out.empty()) o.extra_thresholds = {a.level};
    DenoiseResult r = denoise(f, w, a.alpha, FidelitySpec::power(a.p), o);
    out << "backend " << backend_name(r.backend) << "\n"
        << "alpha " << num(r.alpha) << "\n"
        << "energy " << num(r.energy) << "\n"
        << "gap " << num(r.gap) << "\n"
        << "iterations " << r.iterations << "\n"
        << "u_min " << num(r.u.min()) << "\n"
        << "u_max " << num(r.u.max()) << "\n";
    if (!a.output.empty()) save_field(a.output, r.u);
    if (!a.mask_out.empty()) {
        BinarySet e = level_set(r, a.level);
        save_mask(a.mask_out, e);
        out << "level_area " << num(e.area()) << "\n";
    }
    return 0;
}

struct CurvatureArgs {
    std::string input, output;
    int count = 64;
    double lo = 0.5, hi = 0.0;
    bool inner = true, outer = true;
};

int run_curvature(const CurvatureArgs& a, std::ostream& out) {
    BinarySet d = load_mask(a.input);
    if (d.empty()) throw Error(ErrorCode::EmptyInput, a.input + ": empty mask");
    double hi = a.hi > 0 ? a.hi : 4.0 / d.grid().h;
    if (a.count < 2 || !(a.lo > 0 && hi > a.lo)) throw Error(ErrorCode::InvalidArgument, "bad lambda range");
    CurvatureOptions o;
    o.inner = a.inner;
    o.outer = a.outer;
    VariationalCurvature vc = variational_curvature(d, geometric_lambdas(a.lo, hi, a.count), o);
    double kin = std::numeric_limits<double>::infinity(), kax = -kin;
    for (std::size_t k = 0; k < d.grid().size(); ++k)
        if (d[k]) {
            kin = std::min(kin, vc.kappa[k]);
            kax = std::max(kax, vc.kappa[k]);
        }
    out << "lambdas " << vc.lambdas.size() << "\n"
        << "kappa_inside_min " << num(kin) << "\n"
        << "kappa_inside_max " << num(kax) << "\n"
        << "uncaptured " << vc.uncaptured.size() << "\n"
        << "max_ratio " << num(vc.max_ratio) << "\n";
    if (!a.output.empty()) save_field(a.output, vc.kappa);
    return 0;
}

struct CheegerArgs {
    std::string input, output, overlay;
    double tol = 1e-9;
};

int run_cheeger(const CheegerArgs& a, std::ostream& out) {
    BinarySet d = load_mask(a.input);
    if (d.empty()) throw Error(ErrorCode::EmptyInput, a.input + ": empty mask");
    CheegerResult c = cheeger(d, a.tol);
    out << "h " << num(c.h) << "\n"
        << "area " << num(c.set.area()) << "\n"
        << "perimeter " << num(perimeter(c.set)) << "\n"
        << "iterations " << c.iterations << "\n";
    if (!a.output.empty()) save_mask(a.output, c.set);
    if (!a.overlay.empty()) render_overlay(boundary(d), boundary(c.set), a.overlay);
    return 0;
}

struct HausdorffArgs {
    std::string a, b, overlay;
    bool boundary = false;
};

int run_hausdorff(const HausdorffArgs& a, std::ostream& out) {
    BinarySet ea = load_mask(a.a), eb = load_mask(a.b);
    require_same_grid(ea.grid(), eb.grid(), "hausdorff");
    double d = a.boundary ? hausdorff(boundary(ea), boundary(eb)) : hausdorff(ea, eb);
    out << num(d) << "\n";
    if (!a.overlay.empty()) render_overlay(boundary(ea), boundary(eb), a.overlay);
    return 0;
}

struct ExperimentArgs {
    std::string config, output_dir;
};

int run_experiment(const ExperimentArgs& a, const std::uint64_t* seed, std::ostream& out, std::ostream& err) {
    RunConfig c = load_run_config(a.config);
    if (seed) {
        c.seed = *seed;
        c.noise.seed = *seed;
    }
    if (!a.output_dir.empty()) c.output.dir = a.output_dir;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(c.output.dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + c.output.dir + ": " + ec.message());
    fs::path dir(c.output.dir);

    Grid g = c.grid.make();
    Phantom ph = make_phantom(g, c.phantom);
    std::vector<double> levels = c.experiment.levels.empty() ? default_levels(ph) : c.experiment.levels;
    std::string csv_path = (dir / c.output.csv).string();

    if (c.experiment.mode == ExperimentMode::SquareCircle) {
        SquareCircleReport rep = run_square_circle(ph, c.rule.constant, levels, c.solver.options());
        std::ofstream os(csv_path, std::ios::trunc);
        if (!os) throw Error(ErrorCode::IoError, "cannot write " + csv_path);
        os << "s,alpha,constant,w_norm,spurious,dh_oracle,oracle_empty\n" << std::setprecision(17);
        bool ok = !rep.any_spurious;
        for (const auto& r : rep.rows) {
            os << r.s << ',' << rep.alpha << ',' << rep.constant << ',' << rep.w_norm << ',' << (r.spurious ? 1 : 0)
               << ',' << (std::isinf(r.dh_oracle) ? std::string("inf") : num(r.dh_oracle)) << ','
               << (r.oracle_empty ? 1 : 0) << '\n';
            if (!(r.dh_oracle <= 2 * g.h)) ok = false;
        }
        out << "alpha " << num(rep.alpha) << "\n"
            << "spurious " << (rep.any_spurious ? 1 : 0) << "\n"
            << "report " << csv_path << "\n"
            << "passed " << (ok ? 1 : 0) << "\n";
        return ok ? 0 : 1;
    }

    ExperimentOptions o;
    o.solver = c.solver.options();
    o.psi = FidelitySpec::power(c.solver.p);
    o.instrument = c.experiment.instrument;
    o.on_level = [&](int step, double, double s, const BinarySet& e, const BinarySet& truth) {
        std::string stem = "step" + std::to_string(step) + "_s" + level_tag(s);
        if (c.output.masks) save_mask((dir / (stem + ".pgm")).string(), e);
        if (c.output.overlays && !boundary(e).empty() && !boundary(truth).empty())
            render_overlay(boundary(truth), boundary(e), (dir / (stem + ".svg")).string());
    };
    ConvergenceReport rep;
    if (c.experiment.mode == ExperimentMode::Noiseless) {
        rep = run_noiseless_convergence(ph, c.experiment.alphas, levels, o);
    } else {
        NoiseModel n = c.noise;
        if (n.kind == NoiseKind::FarIndicator) n.anchor = {-0.5 * c.phantom.side, -0.5 * c.phantom.side};
        rep = run_noisy_convergence(ph, n, c.rule, c.experiment.steps, levels, o);
    }
    std::ofstream os(csv_path, std::ios::trunc);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + csv_path);
    rep.write_csv(os);
    for (const auto& w : rep.warnings) err << "WARNING " << w << "\n";
    out << "rows " << rep.rows.size() << "\n"
        << "report " << csv_path << "\n"
        << "passed " << (rep.passed ? 1 : 0) << "\n";
    return rep.passed ? 0 : 1;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Total variation denoising, prescribed curvature and Hausdorff convergence tools", "tvl"};
    app.set_version_flag("--version", std::string("tvl ") + TVL_VERSION);
    app.require_subcommand(1);
    std::uint64_t seed = 1;
    CLI::Option* seed_opt = app.add_option("--seed", seed, "Seed for all randomness")->capture_default_str();

    DenoiseArgs da;
    CLI::App* den = app.add_subcommand("denoise", "Solve the ROF-type problem for an image");
    den->add_option("--input", da.input, "Data f (PGM or f64 raster)")->required();
    den->add_option("--noise", da.noise, "Additive noise w (f64 raster)");
    den->add_option("--noise-sigma", da.noise_sigma, "Add seeded Gaussian noise of this standard deviation");
    den->add_option("--alpha", da.alpha, "Regularization parameter")->required();
    den->add_option("--p", da.p, "Fidelity exponent in (1, 2]")->capture_default_str();
    den->add_option("--backend", da.backend, "levelwise_cut or primal_dual")->capture_default_str();
    den->add_option("--levels", da.levels, "Quantization levels of the cut backend")->capture_default_str();
    den->add_option("--exterior", da.exterior, "Value of u beyond the grid")->capture_default_str();
    den->add_flag("--verify", da.verify, "Check nestedness of the level cuts");
    den->add_option("--output", da.output, "Write u as an f64 raster");
    den->add_option("--mask-out", da.mask_out, "Write the level set at --level as a PGM mask");
    den->add_option("--level", da.level, "Level s for --mask-out")->capture_default_str();

    CurvatureArgs ca;
    CLI::App* cur = app.add_subcommand("curvature", "Variational mean curvature of a mask");
    cur->add_option("--input", ca.input, "Mask D (PGM)")->required();
    cur->add_option("--lambdas", ca.count, "Number of geometric lambda values")->capture_default_str();
    cur->add_option("--lambda-min", ca.lo, "Smallest lambda")->capture_default_str();
    cur->add_option("--lambda-max", ca.hi, "Largest lambda (default 4/h)");
    cur->add_option("--output", ca.output, "Write kappa as an f64 raster");
    bool inner_only = false, outer_only = false;
    cur->add_flag("--inner-only", inner_only, "Only the family inside D");
    cur->add_flag("--outer-only", outer_only, "Only the family outside D");

    CheegerArgs ch;
    CLI::App* che = app.add_subcommand("cheeger", "Cheeger constant and maximal Cheeger set of a mask");
    che->add_option("--input", ch.input, "Mask D (PGM)")->required();
    che->add_option("--tol", ch.tol, "Energy tolerance")->capture_default_str();
    che->add_option("--output", ch.output, "Write the Cheeger set as a PGM mask");
    che->add_option("--overlay", ch.overlay, "Write an SVG of both boundaries");

    HausdorffArgs ha;
    CLI::App* hau = app.add_subcommand("hausdorff", "Hausdorff distance between two masks");
    hau->add_option("--a", ha.a, "First mask")->required();
    hau->add_option("--b", ha.b, "Second mask")->required();
    hau->add_flag("--boundary", ha.boundary, "Compare the boundaries instead of the sets");
    hau->add_option("--overlay", ha.overlay, "Write an SVG of both boundaries");

    ExperimentArgs ea;
    CLI::App* exp = app.add_subcommand("experiment", "Run a convergence experiment from a TOML config");
    exp->add_option("--config", ea.config, "Run configuration")->required();
    exp->add_option("--output-dir", ea.output_dir, "Override output.dir");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << e.what() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "ERROR Usage: " << msg << "\n";
        return 2;
    }

    try {
        if (den->parsed()) return run_denoise(da, seed, out);
        if (cur->parsed()) {
            if (inner_only && outer_only) throw Error(ErrorCode::Usage, "--inner-only and --outer-only exclude each other");
            ca.inner = !outer_only;
            ca.outer = !inner_only;
            return run_curvature(ca, out);
        }
        if (che->parsed()) return run_cheeger(ch, out);
        if (hau->parsed()) return run_hausdorff(ha, out);
        if (exp->parsed()) return run_experiment(ea, seed_opt->count() ? &seed : nullptr, out, err);
    } catch (const Error& e) {
        err << "ERROR " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "ERROR IoError: " << e.what() << "\n";
        return 2;
    }
    err << "ERROR Usage: no subcommand\n";
    return 2;
}

}  // namespace tvl
