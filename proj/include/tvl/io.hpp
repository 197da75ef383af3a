#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvl/experiments.hpp"

namespace tvl {

enum class RasterFormat { PgmMask, F64Field };

const char* raster_format_name(RasterFormat f);

// Grid metadata kept in the JSON sidecar <path>.json next to every raster.
struct RasterHeader {
    RasterFormat format = RasterFormat::F64Field;
    int nx = 0;
    int ny = 0;
    double h = 1.0;
    Point origin;
    double vmin = 0.0;
    double vmax = 0.0;

    Grid grid() const { return Grid(nx, ny, h, origin); }
};

std::string sidecar_path(const std::string& path);
RasterHeader read_sidecar(const std::string& path);
void write_sidecar(const std::string& path, const RasterHeader& hdr);

// PGM (P2 or P5, maxval 255) mapped to [0, 1] by /255, or a raw little-endian
// f64 raster described by its sidecar. PGM files without a sidecar get
// h = 1 / max(nx, ny) and the lower-left corner at the origin. The first PGM
// row is the top of the image.
ScalarField load_image(const std::string& path);
// Cells with PGM value >= 128, or f64 value >= 0.5.
BinarySet load_mask(const std::string& path);

void save_field(const std::string& path, const ScalarField& f);
void save_mask(const std::string& path, const BinarySet& e);
// Values clamped to [0, 1] and scaled to 0..255.
void save_pgm(const std::string& path, const ScalarField& f);

// Two layers of boundary edges in physical coordinates: truth solid, computed dashed.
void render_overlay(const BoundarySet& truth, const BoundarySet& computed, const std::string& path);

struct GridConfig {
    int n = 256;
    double extent = 1.1;  // cells cover [-extent, extent]^2

    Grid make() const { return Grid::square(n, -extent, extent); }
    bool operator==(const GridConfig&) const = default;
};

struct SolverConfig {
    Backend backend = Backend::LevelwiseCut;
    int levels = 256;
    double p = 2.0;
    double pd_tolerance = 1e-6;
    int pd_max_iterations = 100000;
    int neighborhood = 16;
    double exterior = 0.0;

    DenoiseOptions options() const;
    bool operator==(const SolverConfig&) const = default;
};

// levelwise_cut (cut) or primal_dual (pd).
Backend parse_backend(const std::string& s);

enum class ExperimentMode { Noiseless, Noisy, SquareCircle };

const char* experiment_mode_name(ExperimentMode m);
ExperimentMode parse_experiment_mode(const std::string& s);

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::Noiseless;
    std::vector<double> alphas = {0.1, 0.05, 0.025, 0.0125};
    std::vector<double> levels;  // empty: default levels of the phantom
    int steps = 4;
    bool instrument = false;

    bool operator==(const ExperimentConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";
    std::string csv = "report.csv";
    bool masks = true;
    bool overlays = true;

    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    std::uint64_t seed = 1;
    GridConfig grid;
    PhantomSpec phantom;
    NoiseModel noise;
    ParameterRule rule;
    SolverConfig solver;
    ExperimentConfig experiment;
    OutputConfig output;

    // InvalidArgument or RuleViolation on bad physical parameters.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

// FormatError on malformed TOML, unknown keys or wrong value types.
RunConfig parse_run_config(const std::string& toml_text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& c);

}  // namespace tvl
