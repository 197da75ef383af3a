#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tvl/curvature.hpp"
#include "tvl/rof.hpp"

namespace tvl {

enum class PhantomKind { Disk, Square, Polygon, SquarePlusFarBall, Stack, TruncatedPingpong };

const char* phantom_kind_name(PhantomKind k);
PhantomKind parse_phantom_kind(const std::string& s);

struct Ball {
    Point center;
    double radius = 0.0;
};

struct PhantomSpec {
    PhantomKind kind = PhantomKind::Disk;
    double radius = 0.5;              // disk
    double side = 1.0;                // square, centered at the origin
    std::vector<Point> polygon;       // empty: an L-shape
    std::vector<double> stack_radii;  // empty: {0.6, 0.3}
    double ell = 0.3;                 // far ball offset from the lower-left corner of the square
    double ball_radius = 0.05;
    int depth = 4;                    // ping-pong

    bool operator==(const PhantomSpec&) const = default;
};

struct Phantom {
    PhantomKind kind = PhantomKind::Disk;
    ScalarField f;
    std::vector<double> values;  // attained values, sorted
    bool indicator = false;      // f = 1_D
    BinarySet support;           // {f != 0}
    std::vector<Ball> balls;     // ping-pong balls C_i and the far ball
    std::vector<double> ball_values;
    std::vector<int> offset_sign;

    BinarySet truth(double s) const { return f.above(s); }
    bool attains(double s) const;
};

Phantom make_phantom(const Grid& g, const PhantomSpec& spec);

// The level of the truncated ping-pong phantom just below the value whose
// binary digits alternate 0101... up to the depth, and the index of that ball.
double pingpong_adversarial_level(int depth);
int pingpong_adversarial_ball(const Phantom& p);
// Boundary distance between {f > s} and the same set with ball k removed.
double ball_removal_distance(const Phantom& p, double s, int k);

enum class NoiseKind { ScaledBump, IidGaussian, FarIndicator };

const char* noise_kind_name(NoiseKind k);
NoiseKind parse_noise_kind(const std::string& s);

struct NoiseModel {
    NoiseKind kind = NoiseKind::IidGaussian;
    std::uint64_t seed = 1;
    double scale = 0.1;   // amplitude at step 0 (standard deviation for Gaussian)
    double decay = 0.5;   // per-step factor
    double support = 2.0; // radius of the support ball around the origin
    // far indicator: r_n = ball_radius decay^n, ell_n = ell decay^{n/2}
    double ell = 0.3;
    double ball_radius = 0.05;
    Point anchor{-0.5, -0.5};

    double amplitude(int step) const;
    Ball far_ball(int step) const;
    ScalarField realize(const Grid& g, int step) const;

    bool operator==(const NoiseModel&) const = default;
};

enum class RuleKind { Hard, Easy, Linear };

const char* rule_kind_name(RuleKind k);
RuleKind parse_rule_kind(const std::string& s);

// hard: |w|_2 / alpha = C; easy: (1/alpha) int psi(w) = C; linear: alpha = C |w|_2.
struct ParameterRule {
    RuleKind kind = RuleKind::Hard;
    double constant = 0.5;

    double alpha(const ScalarField& w, const FidelitySpec& psi) const;
    bool satisfied(const ScalarField& w, double alpha, const FidelitySpec& psi) const;
    // RuleViolation when the hard constant is not below its ceiling.
    void validate(const FidelitySpec& psi) const;

    bool operator==(const ParameterRule&) const = default;
};

struct ConvergenceRow {
    int step = 0;
    double alpha = 0.0;
    double s = 0.0;
    double noise_norm = 0.0;
    double dh_boundary = 0.0;
    double dh_sets = 0.0;
    double dh_complements = 0.0;
    double symdiff = 0.0;
    double support_radius = 0.0;
    double density_inner = 0.0;
    double density_outer = 0.0;
    int sandwich = -1;           // 1 holds, 0 fails, -1 not evaluated
    double curvature_violation = -1.0;
    int components = 0;
    int spurious = 0;            // components of E^s missing the truth set
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> warnings;
    double h = 0.0;
    bool passed = true;

    void write_csv(std::ostream& os) const;
    std::string csv() const;
};

struct ExperimentOptions {
    DenoiseOptions solver;
    FidelitySpec psi;
    std::vector<double> density_radii;  // empty: {2h, 4h, 8h}
    bool instrument = true;             // sandwich and curvature domination for indicator data
    std::vector<double> lambdas;        // empty: default_lambdas
    double support_bound = 0.0;         // noisy runs; 0 picks the noise support plus 2h
    std::vector<double> alphas;         // noisy runs: explicit alpha_n, checked against the rule
    // called with (step, alpha, s, E^s, G^s) for every recorded level
    std::function<void(int, double, double, const BinarySet&, const BinarySet&)> on_level;
};

// Default evaluation levels: {0.25, 0.5, 0.75} for indicators, midpoints of
// consecutive attained values otherwise.
std::vector<double> default_levels(const Phantom& p);

ConvergenceReport run_noiseless_convergence(const Phantom& phantom, const std::vector<double>& alphas,
                                            const std::vector<double>& s_list, const ExperimentOptions& opt = {});

ConvergenceReport run_noisy_convergence(const Phantom& phantom, const NoiseModel& noise, const ParameterRule& rule,
                                        int n_steps, const std::vector<double>& s_list,
                                        const ExperimentOptions& opt = {});

struct SquareCircleRow {
    double s = 0.0;
    bool spurious = false;      // some component of E^s meets the far ball
    double dh_oracle = 0.0;     // boundary distance to the rounded square, inf if one side is empty
    bool oracle_empty = false;
};

struct SquareCircleReport {
    double alpha = 0.0;
    double constant = 0.0;
    double w_norm = 0.0;
    std::vector<SquareCircleRow> rows;
    bool any_spurious = false;
};

// f = 1_S with S the side-1 square at the origin, w = 1_B for the far ball of
// the phantom, alpha = C |w|_2.
SquareCircleReport run_square_circle(const Phantom& phantom, double constant, const std::vector<double>& s_list,
                                     const DenoiseOptions& solver = {});

struct ApproximationRow {
    double lambda = 0.0;
    double inner_gap = 0.0;  // |D \ D^lambda|
    double outer_gap = 0.0;  // |D^{-lambda} \ D|
    double dh_inner = 0.0;   // boundary distance, inf when D^lambda is empty
    double dh_outer = 0.0;
};

struct ApproximationReport {
    std::vector<ApproximationRow> rows;
    double limit = 0.0;  // 4 h Per(D)
    bool monotone = true;
    bool reaches_limit = false;
    bool rolling_ball = true;  // dh <= 2/lambda + 2h wherever D^{+-lambda} is nonempty, convex D only
    bool convex = false;
    std::vector<std::string> warnings;
};

ApproximationReport verify_approximation_lemmas(const BinarySet& d, const std::vector<double>& lambdas,
                                                const FamilyOptions& opt = {});

struct DensityReport {
    double sup_far = 0.0;  // sup |v| over cells at distance >= delta from the boundary of D
    double far_bound = 0.0;
    bool far_ok = false;
    std::vector<double> levels;
    std::vector<double> inner_min;  // per level, minimum over radii and over boundary points away from D
    std::vector<double> outer_min;
    double c_k = 0.0;  // smallest minimum over levels
    double r_k = 0.0;
};

DensityReport verify_density_estimates(const DenoiseResult& r, const BinarySet& d, double delta,
                                       const std::vector<double>& radii, const std::vector<double>& s_list);

// Fraction of cells where |v| > |kappa| + tol.
double curvature_violation(const DenoiseResult& r, const CurvatureField& kappa, double tol);

}  // namespace tvl
