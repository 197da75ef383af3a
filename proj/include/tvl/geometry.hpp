#pragma once

#include <vector>

#include "tvl/grid.hpp"

namespace tvl {

// One undirected edge family: cell p is joined to p + (dx, dy).
struct EdgeFamily {
    int dx = 0;
    int dy = 0;
    double weight = 0.0;  // cut cost in units of h
};

struct PerimeterScheme {
    int neighborhood = 16;
    std::vector<EdgeFamily> families;

    // 4: unit l1 weights. 8 and 16: Cauchy-Crofton weights.
    static PerimeterScheme make(int neighborhood = 16);
    // Cut length per unit length of a straight line with direction angle theta.
    double directional_cost(double theta) const;
    int reach() const;
};

const PerimeterScheme& default_scheme();

// Weighted cut length; cells outside the grid count as outside E.
double perimeter(const BinarySet& e, const PerimeterScheme& scheme = default_scheme());

// Edge midpoints between 4-adjacent differing cells. Stored on the half-cell
// lattice: lattice (a, b) sits at physical (xmin + a*h/2, ymin + b*h/2).
struct BoundarySet {
    Grid grid;
    std::vector<int> la;
    std::vector<int> lb;

    std::size_t size() const { return la.size(); }
    bool empty() const { return la.empty(); }
    Point point(std::size_t k) const;
    std::vector<Point> points() const;
};

BoundarySet boundary(const BinarySet& e);

double hausdorff(const BinarySet& a, const BinarySet& b);
double hausdorff(const BoundarySet& a, const BoundarySet& b);
// Plain O(nm) evaluation for arbitrary point clouds.
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

// Exact squared Euclidean distance transform (in lattice units) to the true
// sites of a w x h lattice; empty site set gives +inf everywhere.
std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& sites, int w, int h);

// Physical distance from each cell center to the nearest boundary point of e.
ScalarField distance_to_boundary(const BinarySet& e);

struct HausdorffBoundReport {
    double d_boundary = 0.0;
    double d_sets = 0.0;
    double d_complements = 0.0;
    double slack = 0.0;
    bool holds = false;
};

HausdorffBoundReport boundary_hausdorff_bound_check(const BinarySet& e, const BinarySet& f);

struct DensityProfile {
    std::vector<double> radii;
    std::vector<double> inner_min;
    std::vector<double> outer_min;
};

DensityProfile density_profile(const BinarySet& e, const std::vector<double>& radii);
// Same, restricted to boundary points with keep[k] true.
DensityProfile density_profile(const BinarySet& e, const std::vector<double>& radii, const BoundarySet& pts,
                               const std::vector<std::uint8_t>& keep);

BinarySet convex_hull(const BinarySet& e);

// Rasterizers (cell-center membership).
BinarySet rasterize_disk(const Grid& g, Point c, double r);
BinarySet rasterize_rect(const Grid& g, double x0, double y0, double x1, double y1);
BinarySet rasterize_polygon(const Grid& g, const std::vector<Point>& poly);

// Connected components under the scheme's edge families; labels -1 outside e.
std::vector<int> connected_components(const BinarySet& e, const PerimeterScheme& scheme, int* count);

}  // namespace tvl
