#include "tvl/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "toml.hpp"

namespace tvl {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

bool file_exists(const std::string& path) { return static_cast<bool>(std::ifstream(path)); }

struct Pgm {
    int w = 0, h = 0;
    std::vector<std::uint8_t> pix;  // row-major, first row on top
};

Pgm parse_pgm(const std::string& data, const std::string& path) {
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) { return Error(ErrorCode::FormatError, path + ": " + why); };
    auto skip = [&] {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&] {
        skip();
        if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos]))) throw fail("malformed header");
        long v = 0;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
            v = v * 10 + (data[pos++] - '0');
            if (v > 1 << 20) throw fail("header value out of range");
        }
        return static_cast<int>(v);
    };
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '2')) throw fail("not a P2/P5 PGM");
    bool binary = data[1] == '5';
    pos = 2;
    Pgm p;
    p.w = number();
    p.h = number();
    int maxval = number();
    if (p.w <= 0 || p.h <= 0) throw fail("empty image");
    if (maxval != 255) throw fail("only maxval 255 is supported");
    std::size_t n = static_cast<std::size_t>(p.w) * p.h;
    p.pix.resize(n);
    if (binary) {
        if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) throw fail("malformed header");
        ++pos;
        if (data.size() - pos < n) throw fail("truncated pixel data");
        std::memcpy(p.pix.data(), data.data() + pos, n);
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            int v = number();
            if (v > 255) throw fail("pixel value above maxval");
            p.pix[k] = static_cast<std::uint8_t>(v);
        }
    }
    return p;
}

RasterHeader default_pgm_header(int w, int h) {
    RasterHeader hdr;
    hdr.format = RasterFormat::PgmMask;
    hdr.nx = w;
    hdr.ny = h;
    hdr.h = 1.0 / std::max(w, h);
    hdr.origin = {0.5 * hdr.h, 0.5 * hdr.h};
    return hdr;
}

Grid pgm_grid(const std::string& path, const Pgm& p) {
    if (!file_exists(sidecar_path(path))) return default_pgm_header(p.w, p.h).grid();
    RasterHeader hdr = read_sidecar(path);
    if (hdr.nx != p.w || hdr.ny != p.h) throw Error(ErrorCode::GridMismatch, path + ": sidecar size disagrees with the image");
    return hdr.grid();
}

// PGM rows run top to bottom, grid rows bottom to top.
std::size_t pixel_of(const Grid& g, std::size_t k) {
    return static_cast<std::size_t>(g.ny - 1 - g.row(k)) * g.nx + g.col(k);
}

bool is_pgm(const std::string& data) { return data.size() >= 2 && data[0] == 'P' && (data[1] == '5' || data[1] == '2'); }

void write_pgm(const std::string& path, const Grid& g, const std::vector<std::uint8_t>& level, double vmin, double vmax) {
    std::ostringstream os;
    os << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    std::string data = os.str();
    std::size_t head = data.size();
    data.resize(head + g.size());
    for (std::size_t k = 0; k < g.size(); ++k) data[head + pixel_of(g, k)] = static_cast<char>(level[k]);
    write_file(path, data);
    RasterHeader hdr{RasterFormat::PgmMask, g.nx, g.ny, g.h, g.origin, vmin, vmax};
    write_sidecar(path, hdr);
}

}  // namespace

const char* raster_format_name(RasterFormat f) { return f == RasterFormat::PgmMask ? "pgm_mask" : "f64_field"; }

std::string sidecar_path(const std::string& path) { return path + ".json"; }

RasterHeader read_sidecar(const std::string& path) {
    std::string sp = sidecar_path(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(sp));
        RasterHeader hdr;
        std::string fmt = j.at("format").get<std::string>();
        if (fmt == "pgm_mask") hdr.format = RasterFormat::PgmMask;
        else if (fmt == "f64_field") hdr.format = RasterFormat::F64Field;
        else throw Error(ErrorCode::FormatError, sp + ": unknown format " + fmt);
        hdr.nx = j.at("nx").get<int>();
        hdr.ny = j.at("ny").get<int>();
        hdr.h = j.at("h").get<double>();
        hdr.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
        hdr.vmin = j.value("min", 0.0);
        hdr.vmax = j.value("max", 0.0);
        if (hdr.nx <= 0 || hdr.ny <= 0 || !(hdr.h > 0)) throw Error(ErrorCode::FormatError, sp + ": bad grid metadata");
        return hdr;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::FormatError, sp + ": " + e.what());
    }
}

void write_sidecar(const std::string& path, const RasterHeader& hdr) {
    nlohmann::ordered_json j;
    j["format"] = raster_format_name(hdr.format);
    j["nx"] = hdr.nx;
    j["ny"] = hdr.ny;
    j["h"] = hdr.h;
    j["origin"] = {hdr.origin.x, hdr.origin.y};
    j["min"] = hdr.vmin;
    j["max"] = hdr.vmax;
    j["byte_order"] = "little";
    write_file(sidecar_path(path), j.dump(2) + "\n");
}

ScalarField load_image(const std::string& path) {
    std::string data = read_file(path);
    if (is_pgm(data)) {
        Pgm p = parse_pgm(data, path);
        Grid g = pgm_grid(path, p);
        ScalarField f(g);
        for (std::size_t k = 0; k < g.size(); ++k) f[k] = p.pix[pixel_of(g, k)] / 255.0;
        return f;
    }
    if (!file_exists(sidecar_path(path))) throw Error(ErrorCode::FormatError, path + ": not a PGM and no sidecar");
    RasterHeader hdr = read_sidecar(path);
    if (hdr.format != RasterFormat::F64Field) throw Error(ErrorCode::FormatError, path + ": sidecar says pgm_mask");
    Grid g = hdr.grid();
    if (data.size() != g.size() * sizeof(double))
        throw Error(ErrorCode::GridMismatch, path + ": raster size disagrees with the sidecar");
    ScalarField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[8 * k + b])) << (8 * b);
        f[k] = std::bit_cast<double>(bits);
    }
    return f;
}

BinarySet load_mask(const std::string& path) {
    std::string data = read_file(path);
    if (is_pgm(data)) {
        Pgm p = parse_pgm(data, path);
        Grid g = pgm_grid(path, p);
        BinarySet e(g);
        for (std::size_t k = 0; k < g.size(); ++k) e.set(k, p.pix[pixel_of(g, k)] >= 128);
        return e;
    }
    ScalarField f = load_image(path);
    BinarySet e(f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) e.set(k, f[k] >= 0.5);
    return e;
}

void save_field(const std::string& path, const ScalarField& f) {
    const Grid& g = f.grid();
    std::string data(g.size() * sizeof(double), '\0');
    for (std::size_t k = 0; k < g.size(); ++k) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(f[k]);
        for (int b = 0; b < 8; ++b) data[8 * k + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    write_file(path, data);
    write_sidecar(path, {RasterFormat::F64Field, g.nx, g.ny, g.h, g.origin, f.min(), f.max()});
}

void save_mask(const std::string& path, const BinarySet& e) {
    std::vector<std::uint8_t> level(e.grid().size());
    for (std::size_t k = 0; k < level.size(); ++k) level[k] = e[k] ? 255 : 0;
    write_pgm(path, e.grid(), level, 0.0, 1.0);
}

void save_pgm(const std::string& path, const ScalarField& f) {
    std::vector<std::uint8_t> level(f.size());
    for (std::size_t k = 0; k < level.size(); ++k)
        level[k] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(f[k], 0.0, 1.0)));
    write_pgm(path, f.grid(), level, 0.0, 1.0);
}

void render_overlay(const BoundarySet& truth, const BoundarySet& computed, const std::string& path) {
    if (truth.empty()) throw Error(ErrorCode::EmptyInput, "overlay: empty truth boundary");
    if (computed.empty()) throw Error(ErrorCode::EmptyInput, "overlay: empty computed boundary");
    const Grid& g = truth.grid;
    double w = g.xmax() - g.xmin(), hgt = g.ymax() - g.ymin();
    std::ostringstream os;
    os << std::setprecision(10);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << std::lround(800 * hgt / w)
       << "\" viewBox=\"" << g.xmin() << ' ' << -g.ymax() << ' ' << w << ' ' << hgt
       << "\" preserveAspectRatio=\"xMidYMid meet\">\n"
       << "<rect x=\"" << g.xmin() << "\" y=\"" << -g.ymax() << "\" width=\"" << w << "\" height=\"" << hgt
       << "\" fill=\"white\"/>\n"
       << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-linecap=\"round\">\n";
    auto layer = [&](const BoundarySet& b, const char* id, const char* style) {
        os << "<path id=\"" << id << "\" " << style << " d=\"";
        for (std::size_t k = 0; k < b.size(); ++k) {
            Point p = b.point(k);
            // edge between horizontal neighbors is vertical and vice versa
            bool vertical = b.la[k] % 2 == 0;
            double dx = vertical ? 0.0 : 0.5 * b.grid.h, dy = vertical ? 0.5 * b.grid.h : 0.0;
            auto c = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
            os << 'M' << c(p.x - dx) << ' ' << c(p.y - dy) << 'L' << c(p.x + dx) << ' ' << c(p.y + dy);
        }
        os << "\"/>\n";
    };
    double sw = 0.6 * g.h;
    std::ostringstream ts, cs;
    ts << "stroke=\"#1f5fb4\" stroke-width=\"" << sw << '"';
    cs << "stroke=\"#d62728\" stroke-width=\"" << 0.5 * sw << "\" stroke-dasharray=\"" << 0.5 * g.h << ' ' << 0.5 * g.h
       << '"';
    layer(truth, "truth", ts.str().c_str());
    layer(computed, "computed", cs.str().c_str());
    os << "</g>\n</svg>\n";
    write_file(path, os.str());
}

DenoiseOptions SolverConfig::options() const {
    DenoiseOptions o;
    o.backend = backend;
    o.levels = levels;
    o.pd_tolerance = pd_tolerance;
    o.pd_max_iterations = pd_max_iterations;
    o.scheme = PerimeterScheme::make(neighborhood);
    o.exterior = exterior;
    return o;
}

Backend parse_backend(const std::string& s) {
    if (s == "levelwise_cut" || s == "cut") return Backend::LevelwiseCut;
    if (s == "primal_dual" || s == "pd") return Backend::PrimalDual;
    throw Error(ErrorCode::InvalidArgument, "unknown backend: " + s);
}

const char* experiment_mode_name(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::Noiseless: return "noiseless";
        case ExperimentMode::Noisy: return "noisy";
        case ExperimentMode::SquareCircle: return "square_circle";
    }
    return "?";
}

ExperimentMode parse_experiment_mode(const std::string& s) {
    for (ExperimentMode m : {ExperimentMode::Noiseless, ExperimentMode::Noisy, ExperimentMode::SquareCircle})
        if (s == experiment_mode_name(m)) return m;
    throw Error(ErrorCode::InvalidArgument, "unknown experiment mode: " + s);
}

void RunConfig::validate() const {
    auto bad = [](const std::string& m) { return Error(ErrorCode::InvalidArgument, m); };
    if (grid.n < 8) throw bad("grid.n must be at least 8");
    if (!(grid.extent > 0)) throw bad("grid.extent must be positive");
    if (!(solver.p > 1.0 && solver.p <= 2.0)) throw bad("solver.p must lie in (1, 2]");
    if (solver.levels < 2) throw bad("solver.levels must be at least 2");
    if (!(solver.pd_tolerance > 0)) throw bad("solver.pd_tolerance must be positive");
    if (solver.pd_max_iterations < 1) throw bad("solver.pd_max_iterations must be positive");
    if (solver.neighborhood != 4 && solver.neighborhood != 8 && solver.neighborhood != 16)
        throw bad("solver.neighborhood must be 4, 8 or 16");
    if (!(phantom.radius > 0 && phantom.radius <= grid.extent)) throw bad("phantom.radius must lie in (0, extent]");
    if (!(phantom.side > 0 && 0.5 * phantom.side <= grid.extent)) throw bad("phantom.side must fit the grid");
    if (!(phantom.ell > 0) || !(phantom.ball_radius > 0)) throw bad("phantom far ball needs positive ell and radius");
    if (std::abs(-0.5 * phantom.side - phantom.ell) + phantom.ball_radius > grid.extent &&
        phantom.kind == PhantomKind::SquarePlusFarBall)
        throw bad("far ball leaves the grid");
    if (phantom.depth < 1 || phantom.depth > 12) throw bad("phantom.depth must lie in [1, 12]");
    for (double r : phantom.stack_radii)
        if (!(r > 0 && r <= grid.extent)) throw bad("phantom.stack_radii must lie in (0, extent]");
    if (!(noise.scale > 0)) throw bad("noise.scale must be positive");
    if (!(noise.decay > 0 && noise.decay <= 1)) throw bad("noise.decay must lie in (0, 1]");
    if (!(noise.support > 0)) throw bad("noise.support must be positive");
    if (!(noise.ell > 0) || !(noise.ball_radius > 0)) throw bad("noise far ball needs positive ell and radius");
    if (experiment.alphas.empty() && experiment.mode == ExperimentMode::Noiseless) throw bad("experiment.alphas is empty");
    for (double a : experiment.alphas)
        if (!(a > 0)) throw bad("experiment.alphas must be positive");
    if (experiment.steps < 1) throw bad("experiment.steps must be positive");
    if (output.csv.empty()) throw bad("output.csv is empty");
    if (experiment.mode == ExperimentMode::Noisy) rule.validate(FidelitySpec::power(solver.p));
    else if (!(rule.constant > 0)) throw Error(ErrorCode::RuleViolation, "rule constant must be positive");
}

namespace {

using Keys = std::set<std::string>;

void check_keys(const toml::table& t, const std::string& where, const Keys& allowed) {
    for (auto&& [k, v] : t)
        if (!allowed.count(std::string(k.str())))
            throw Error(ErrorCode::FormatError, "unknown key " + (where.empty() ? "" : where + ".") + std::string(k.str()));
}

const toml::table* sub(const toml::table& t, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw Error(ErrorCode::FormatError, std::string(key) + " must be a table");
    return n->as_table();
}

[[noreturn]] void type_error(const std::string& where, const char* key, const char* type) {
    throw Error(ErrorCode::FormatError, where + "." + key + " must be " + type);
}

void get(const toml::table& t, const std::string& where, const char* key, double& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    if (auto v = n->value_exact<double>()) out = *v;
    else if (auto i = n->value_exact<std::int64_t>()) out = static_cast<double>(*i);
    else type_error(where, key, "a number");
}

void get(const toml::table& t, const std::string& where, const char* key, int& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    auto v = n->value_exact<std::int64_t>();
    if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) type_error(where, key, "an integer");
    out = static_cast<int>(*v);
}

void get(const toml::table& t, const std::string& where, const char* key, bool& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    auto v = n->value_exact<bool>();
    if (!v) type_error(where, key, "a boolean");
    out = *v;
}

void get(const toml::table& t, const std::string& where, const char* key, std::string& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    auto v = n->value_exact<std::string>();
    if (!v) type_error(where, key, "a string");
    out = *v;
}

void get(const toml::table& t, const std::string& where, const char* key, std::vector<double>& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    const toml::array* a = n->as_array();
    if (!a) type_error(where, key, "an array of numbers");
    out.clear();
    for (const toml::node& e : *a) {
        if (auto v = e.value_exact<double>()) out.push_back(*v);
        else if (auto i = e.value_exact<std::int64_t>()) out.push_back(static_cast<double>(*i));
        else type_error(where, key, "an array of numbers");
    }
}

void get(const toml::table& t, const std::string& where, const char* key, std::vector<Point>& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    const toml::array* a = n->as_array();
    if (!a) type_error(where, key, "an array of [x, y] pairs");
    out.clear();
    for (const toml::node& e : *a) {
        const toml::array* p = e.as_array();
        if (!p || p->size() != 2) type_error(where, key, "an array of [x, y] pairs");
        double xy[2];
        for (int c = 0; c < 2; ++c) {
            if (auto v = (*p)[c].value_exact<double>()) xy[c] = *v;
            else if (auto i = (*p)[c].value_exact<std::int64_t>()) xy[c] = static_cast<double>(*i);
            else type_error(where, key, "an array of [x, y] pairs");
        }
        out.push_back({xy[0], xy[1]});
    }
}

template <class F>
auto parse_enum(const std::string& s, F parse) {
    try {
        return parse(s);
    } catch (const Error& e) {
        throw Error(ErrorCode::FormatError, e.what());
    }
}

toml::array to_array(const std::vector<double>& v) {
    toml::array a;
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML line " << e.source().begin.line << ": " << e.description();
        throw Error(ErrorCode::FormatError, os.str());
    }
    check_keys(root, "", {"seed", "grid", "phantom", "noise", "rule", "solver", "experiment", "output"});
    RunConfig c;
    if (const toml::node* n = root.get("seed")) {
        auto v = n->value_exact<std::int64_t>();
        if (!v || *v < 0) throw Error(ErrorCode::FormatError, "seed must be a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(*v);
    }
    if (const toml::table* t = sub(root, "grid")) {
        check_keys(*t, "grid", {"n", "extent"});
        get(*t, "grid", "n", c.grid.n);
        get(*t, "grid", "extent", c.grid.extent);
    }
    if (const toml::table* t = sub(root, "phantom")) {
        check_keys(*t, "phantom", {"kind", "radius", "side", "polygon", "stack_radii", "ell", "ball_radius", "depth"});
        std::string kind = phantom_kind_name(c.phantom.kind);
        get(*t, "phantom", "kind", kind);
        c.phantom.kind = parse_enum(kind, parse_phantom_kind);
        get(*t, "phantom", "radius", c.phantom.radius);
        get(*t, "phantom", "side", c.phantom.side);
        get(*t, "phantom", "polygon", c.phantom.polygon);
        get(*t, "phantom", "stack_radii", c.phantom.stack_radii);
        get(*t, "phantom", "ell", c.phantom.ell);
        get(*t, "phantom", "ball_radius", c.phantom.ball_radius);
        get(*t, "phantom", "depth", c.phantom.depth);
    }
    if (const toml::table* t = sub(root, "noise")) {
        check_keys(*t, "noise", {"kind", "scale", "decay", "support", "ell", "ball_radius", "anchor"});
        std::string kind = noise_kind_name(c.noise.kind);
        get(*t, "noise", "kind", kind);
        c.noise.kind = parse_enum(kind, parse_noise_kind);
        get(*t, "noise", "scale", c.noise.scale);
        get(*t, "noise", "decay", c.noise.decay);
        get(*t, "noise", "support", c.noise.support);
        get(*t, "noise", "ell", c.noise.ell);
        get(*t, "noise", "ball_radius", c.noise.ball_radius);
        std::vector<double> anchor;
        get(*t, "noise", "anchor", anchor);
        if (t->get("anchor")) {
            if (anchor.size() != 2) throw Error(ErrorCode::FormatError, "noise.anchor must be [x, y]");
            c.noise.anchor = {anchor[0], anchor[1]};
        }
    }
    if (const toml::table* t = sub(root, "rule")) {
        check_keys(*t, "rule", {"kind", "constant"});
        std::string kind = rule_kind_name(c.rule.kind);
        get(*t, "rule", "kind", kind);
        c.rule.kind = parse_enum(kind, parse_rule_kind);
        get(*t, "rule", "constant", c.rule.constant);
    }
    if (const toml::table* t = sub(root, "solver")) {
        check_keys(*t, "solver",
                   {"backend", "levels", "p", "pd_tolerance", "pd_max_iterations", "neighborhood", "exterior"});
        std::string backend = backend_name(c.solver.backend);
        get(*t, "solver", "backend", backend);
        c.solver.backend = parse_enum(backend, parse_backend);
        get(*t, "solver", "levels", c.solver.levels);
        get(*t, "solver", "p", c.solver.p);
        get(*t, "solver", "pd_tolerance", c.solver.pd_tolerance);
        get(*t, "solver", "pd_max_iterations", c.solver.pd_max_iterations);
        get(*t, "solver", "neighborhood", c.solver.neighborhood);
        get(*t, "solver", "exterior", c.solver.exterior);
    }
    if (const toml::table* t = sub(root, "experiment")) {
        check_keys(*t, "experiment", {"mode", "alphas", "levels", "steps", "instrument"});
        std::string mode = experiment_mode_name(c.experiment.mode);
        get(*t, "experiment", "mode", mode);
        c.experiment.mode = parse_enum(mode, parse_experiment_mode);
        get(*t, "experiment", "alphas", c.experiment.alphas);
        get(*t, "experiment", "levels", c.experiment.levels);
        get(*t, "experiment", "steps", c.experiment.steps);
        get(*t, "experiment", "instrument", c.experiment.instrument);
    }
    if (const toml::table* t = sub(root, "output")) {
        check_keys(*t, "output", {"dir", "csv", "masks", "overlays"});
        get(*t, "output", "dir", c.output.dir);
        get(*t, "output", "csv", c.output.csv);
        get(*t, "output", "masks", c.output.masks);
        get(*t, "output", "overlays", c.output.overlays);
    }
    c.noise.seed = c.seed;
    c.validate();
    return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path)); }

std::string serialize_run_config(const RunConfig& c) {
    toml::table root;
    root.insert("seed", static_cast<std::int64_t>(c.seed));
    root.insert("grid", toml::table{{"n", c.grid.n}, {"extent", c.grid.extent}});
    toml::array poly;
    for (Point p : c.phantom.polygon) poly.push_back(toml::array{p.x, p.y});
    root.insert("phantom", toml::table{{"kind", phantom_kind_name(c.phantom.kind)},
                                       {"radius", c.phantom.radius},
                                       {"side", c.phantom.side},
                                       {"polygon", poly},
                                       {"stack_radii", to_array(c.phantom.stack_radii)},
                                       {"ell", c.phantom.ell},
                                       {"ball_radius", c.phantom.ball_radius},
                                       {"depth", c.phantom.depth}});
    root.insert("noise", toml::table{{"kind", noise_kind_name(c.noise.kind)},
                                     {"scale", c.noise.scale},
                                     {"decay", c.noise.decay},
                                     {"support", c.noise.support},
                                     {"ell", c.noise.ell},
                                     {"ball_radius", c.noise.ball_radius},
                                     {"anchor", toml::array{c.noise.anchor.x, c.noise.anchor.y}}});
    root.insert("rule", toml::table{{"kind", rule_kind_name(c.rule.kind)}, {"constant", c.rule.constant}});
    root.insert("solver", toml::table{{"backend", backend_name(c.solver.backend)},
                                      {"levels", c.solver.levels},
                                      {"p", c.solver.p},
                                      {"pd_tolerance", c.solver.pd_tolerance},
                                      {"pd_max_iterations", c.solver.pd_max_iterations},
                                      {"neighborhood", c.solver.neighborhood},
                                      {"exterior", c.solver.exterior}});
    root.insert("experiment", toml::table{{"mode", experiment_mode_name(c.experiment.mode)},
                                          {"alphas", to_array(c.experiment.alphas)},
                                          {"levels", to_array(c.experiment.levels)},
                                          {"steps", c.experiment.steps},
                                          {"instrument", c.experiment.instrument}});
    root.insert("output", toml::table{{"dir", c.output.dir},
                                      {"csv", c.output.csv},
                                      {"masks", c.output.masks},
                                      {"overlays", c.output.overlays}});
    std::ostringstream os;
    os << root << "\n";
    return os.str();
}

}  // namespace tvl
