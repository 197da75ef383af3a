#pragma once

#include <vector>

#include "tvl/cut.hpp"
#include "tvl/geometry.hpp"

namespace tvl {

// psi(t) = |t|^p / p with p in (1, 2].
struct FidelitySpec {
    double p = 2.0;

    static FidelitySpec power(double p);

    double q() const { return p / (p - 1.0); }
    double psi(double t) const;
    double dpsi(double t) const;
    double dpsi_inverse(double y) const;
    double psi_star(double t) const;
    // modulus of uniform convexity of psi*: t^q / (q 2^{q-2})
    double modulus(double t) const;
    // inverse of t -> 2 m(t) / t
    double sigma(double y) const;
};

enum class Backend { LevelwiseCut, PrimalDual };

const char* backend_name(Backend b);

struct DenoiseOptions {
    Backend backend = Backend::LevelwiseCut;
    int levels = 256;
    // thresholds inserted exactly, so their upper level sets are stored cuts
    std::vector<double> extra_thresholds;
    // when nonempty, replaces the automatic threshold placement
    std::vector<double> thresholds;
    // value of u beyond the grid border
    double exterior = 0.0;
    bool refine = true;
    bool verify = false;
    double pd_tolerance = 1e-6;  // relative to the initial gap
    int pd_max_iterations = 100000;
    PerimeterScheme scheme = PerimeterScheme::make(16);
};

struct DenoiseResult {
    ScalarField u;
    ScalarField v;         // -psi'(u - f - w) / alpha
    ScalarField u_levels;  // quantized solution of the cut backend
    double alpha = 0.0;
    double exterior = 0.0;
    double gap = 0.0;
    double initial_gap = 0.0;
    double energy = 0.0;
    Backend backend = Backend::LevelwiseCut;
    FidelitySpec psi;
    std::vector<double> thresholds;
    std::vector<int> label;  // number of thresholds below u, cut backend only
    int iterations = 0;
    double runtime = 0.0;  // seconds
};

// Weighted graph total variation with the exterior held at a constant.
double graph_tv(const ScalarField& u, const PerimeterScheme& scheme = default_scheme(), double exterior = 0.0);

// sum h^2 psi(u - data) + alpha TV(u)
double rof_energy(const ScalarField& u, const ScalarField& data, double alpha, const FidelitySpec& psi,
                  const PerimeterScheme& scheme = default_scheme(), double exterior = 0.0);

DenoiseResult denoise(const ScalarField& f, const ScalarField& w, double alpha, const FidelitySpec& psi,
                      const DenoiseOptions& opt = {});
DenoiseResult denoise(const ScalarField& f, double alpha, const FidelitySpec& psi, const DenoiseOptions& opt = {});

// {u > s} for s at or above the exterior value, {u < s} below it. Stored
// thresholds are read from the cut labels.
BinarySet level_set(const DenoiseResult& r, double s);

struct LevelOptimality {
    double residual = 0.0;  // |Per(E) - int_E v| / Per(E), with the sign flipped for lower sets
    double literal_residual = 0.0;  // same with psi'(f + w - s) / alpha in place of v
    double per = 0.0;
    double certificate = 0.0;
};

LevelOptimality level_optimality_check(const DenoiseResult& r, const ScalarField& f, const ScalarField& w, double s,
                                       const PerimeterScheme& scheme = default_scheme());

double dual_stability_bound(const FidelitySpec& psi, double w_norm, double alpha);
// m(Theta) / Theta with the planar isoperimetric constant Theta = 2 sqrt(pi).
double hard_rule_ceiling(const FidelitySpec& psi);

struct DualStabilityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double bound = 0.0;  // rhs without slack
    bool holds = false;
};

DualStabilityReport verify_dual_stability(const ScalarField& f, const ScalarField& w, double alpha,
                                          const FidelitySpec& psi, const DenoiseOptions& opt = {});

struct ComparisonReport {
    bool ordered = false;        // u^g <= u^f on every cell
    double max_violation = 0.0;  // max (u^g - u^f)^+
    bool range_f = false;
    bool range_g = false;
    DenoiseResult uf, ug;
};

ComparisonReport verify_comparison(const ScalarField& f, const ScalarField& g, double alpha, const FidelitySpec& psi,
                                   const DenoiseOptions& opt = {});

}  // namespace tvl
