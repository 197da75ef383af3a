#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "tvl/geometry.hpp"

namespace tvl::testing {

// Union of a few random disks inside [lo+pad, hi-pad]^2 of grid g.
inline BinarySet random_blobs(const Grid& g, std::mt19937_64& rng, int count, double rmin, double rmax,
                              double pad) {
    std::uniform_real_distribution<double> ux(g.xmin() + pad + rmax, g.xmax() - pad - rmax);
    std::uniform_real_distribution<double> uy(g.ymin() + pad + rmax, g.ymax() - pad - rmax);
    std::uniform_real_distribution<double> ur(rmin, rmax);
    BinarySet e(g);
    for (int c = 0; c < count; ++c) e = e | rasterize_disk(g, {ux(rng), uy(rng)}, ur(rng));
    return e;
}

inline BinarySet random_mask(const Grid& g, std::mt19937_64& rng, double p) {
    std::bernoulli_distribution b(p);
    BinarySet e(g);
    for (std::size_t k = 0; k < g.size(); ++k) e.set(k, b(rng));
    return e;
}

// Square with corners rounded at radius rho: union of the balls of radius rho inside it.
inline BinarySet rounded_square(const Grid& g, double x0, double y0, double side, double rho) {
    BinarySet e(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        Point p = g.center(k);
        double u = p.x - x0, v = p.y - y0;
        if (u <= 0 || v <= 0 || u >= side || v >= side) continue;
        double cx = std::clamp(u, rho, side - rho), cy = std::clamp(v, rho, side - rho);
        e.set(k, std::hypot(u - cx, v - cy) < rho);
    }
    return e;
}

// Closed-form kappa_S of the unit square [0,1]^2, folded onto the nearest corner.
inline double kappa_square(double x, double y) {
    x = std::min(x, 1.0 - x);
    y = std::min(y, 1.0 - y);
    double v = 1.0 / (x + y + std::sqrt(2 * x * y));
    return std::max(v, 2.0 + std::sqrt(3.14159265358979323846));
}

// Unit square minus a thin triangle from the bottom edge up to its center.
inline BinarySet set_not_bdy(const Grid& g, int n) {
    BinarySet sq = rasterize_rect(g, 0.0, 0.0, 1.0, 1.0);
    double b = 1.0 / (n + 2);
    BinarySet tri = rasterize_polygon(g, {{0.5 - b, 0.0}, {0.5 + b, 0.0}, {0.5, 0.5}});
    return sq.minus(tri);
}

}  // namespace tvl::testing
