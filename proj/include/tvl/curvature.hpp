#pragma once

#include <cstdint>
#include <vector>

#include "tvl/cut.hpp"
#include "tvl/geometry.hpp"

namespace tvl {

// Values in 1/length, one per cell.
using CurvatureField = ScalarField;

struct Constraint {
    enum class Kind { None, Inside, Outside };
    Kind kind = Kind::None;
    BinarySet d;

    static Constraint none() { return {}; }
    static Constraint inside(const BinarySet& d) { return {Kind::Inside, d}; }
    static Constraint outside(const BinarySet& d) { return {Kind::Outside, d}; }
    bool allows(std::size_t k) const;
};

struct PmcResult {
    BinarySet set;
    double energy = 0.0;
};

// Discrete energy  cut_length(E) - h^2 sum_E kappa.
double pmc_energy(const BinarySet& e, const CurvatureField& kappa, const PerimeterScheme& scheme = default_scheme(),
                  Border border = Border::Outside);

// Exact minimizer by one min-cut. Throws UnboundedBelow when the exterior is
// taken as inside (Border::Inside) and the minimizer reaches it with negative energy.
PmcResult minimize_pmc(const CurvatureField& kappa, const Constraint& constraint, Select select,
                       const PerimeterScheme& scheme = default_scheme(), Border border = Border::Outside);

struct RelaxedOptions {
    int max_iterations = 200000;
    double gap_tolerance = 1e-8;  // relative to the initial gap
};

struct RelaxedResult {
    ScalarField u;  // values in [0, 1]
    BinarySet set;  // {u > 1/2}
    double energy = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    int iterations = 0;
};

// Same energy relaxed to u in [0, 1] with the graph TV of the scheme, solved
// by preconditioned primal-dual iterations.
RelaxedResult minimize_pmc_relaxed(const CurvatureField& kappa, const Constraint& constraint,
                                   const RelaxedOptions& opt = {}, const PerimeterScheme& scheme = default_scheme(),
                                   Border border = Border::Outside);

// Density g: 1 on the ball of radius R (in units of the normalization radius)
// around the normalization center, g_far beyond.
struct DensitySpec {
    double R = 2.0;
    double g_far = 0.5;
};

// Affine normalization of D to the unit ball: center of the bounding box and
// the largest distance from it to a cell center of D.
struct Normalization {
    Point center;
    double radius = 0.0;
};

Normalization normalization(const BinarySet& d);
ScalarField density_field(const Grid& g, const Normalization& n, const DensitySpec& spec);

enum class Direction { Inner, Outer };

// Nested family over an increasing lambda grid. entry[q] is the first index
// whose minimizer contains q (lambdas.size() if never): the maximal minimizer
// inside D for Inner, the maximal minimizer F outside D for Outer.
struct ParametricFamily {
    Direction direction = Direction::Inner;
    BinarySet d;
    std::vector<double> lambdas;
    std::vector<int> entry;

    int size() const { return static_cast<int>(lambdas.size()); }
    BinarySet minimizer(int k) const;
    // D^lambda for Inner, D^{-lambda} = complement of F for Outer.
    BinarySet set(int k) const;
};

struct FamilyOptions {
    DensitySpec density;
    bool confine = true;  // restrict outer solves to B(c, 2q) above the threshold
    bool verify = false;  // re-solve some members independently
    PerimeterScheme scheme = PerimeterScheme::make(16);
};

ParametricFamily level_family(const BinarySet& d, Direction dir, const std::vector<double>& lambdas,
                              const FamilyOptions& opt = {});

std::vector<double> geometric_lambdas(double lo, double hi, int n);
// 64 geometric values from 0.5 to 4/h.
std::vector<double> default_lambdas(const Grid& g);

struct CurvatureOptions {
    FamilyOptions family;
    bool inner = true;
    bool outer = true;
};

struct VariationalCurvature {
    CurvatureField kappa;
    std::vector<double> lambdas;
    std::vector<std::size_t> uncaptured;  // cells never captured at the largest lambda
    double max_ratio = 1.0;               // largest lambda_{k+1}/lambda_k
};

VariationalCurvature variational_curvature(const BinarySet& d, const std::vector<double>& lambdas,
                                           const CurvatureOptions& opt = {});

struct CheegerResult {
    double h = 0.0;
    BinarySet set;
    int iterations = 0;
};

CheegerResult cheeger(const BinarySet& d, double tol = 1e-9, const PerimeterScheme& scheme = default_scheme());

struct CurvatureInequalityReport {
    double ratio_plus = 0.0;
    double ratio_minus = 0.0;
    bool passes = true;
    Point witness_center;
    double witness_radius = 0.0;
    int samples = 0;
};

// Randomized search for test sets A with  int_A kappa^+- > xi Per(A).
CurvatureInequalityReport check_curvature_inequality(const CurvatureField& kappa, double xi, double r0, int samples,
                                                     std::uint64_t seed = 1,
                                                     const PerimeterScheme& scheme = default_scheme());

}  // namespace tvl
