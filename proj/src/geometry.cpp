#include "tvl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace tvl {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFar = 1e30;

void require_nonempty(const BinarySet& e, const char* what) {
    if (e.empty()) throw Error(ErrorCode::EmptyInput, std::string(what) + ": empty set");
}

}  // namespace

PerimeterScheme PerimeterScheme::make(int neighborhood) {
    PerimeterScheme s;
    s.neighborhood = neighborhood;
    std::vector<std::pair<int, int>> dirs;
    if (neighborhood == 4) {
        s.families = {{1, 0, 1.0}, {0, 1, 1.0}};
        return s;
    } else if (neighborhood == 8) {
        dirs = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    } else if (neighborhood == 16) {
        dirs = {{1, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 1}, {-1, 2}, {-1, 1}, {-2, 1}};
    } else {
        throw Error(ErrorCode::InvalidArgument, "neighborhood must be 4, 8 or 16");
    }
    // dirs are listed by increasing angle in [0, pi)
    const std::size_t n = dirs.size();
    std::vector<double> ang(n);
    for (std::size_t k = 0; k < n; ++k) ang[k] = std::atan2(dirs[k].second, dirs[k].first);
    for (std::size_t k = 0; k < n; ++k) {
        double next = (k + 1 < n) ? ang[k + 1] : ang[0] + kPi;
        double prev = (k > 0) ? ang[k - 1] : ang[n - 1] - kPi;
        double dphi = 0.5 * (next - prev);
        double len = std::hypot(dirs[k].first, dirs[k].second);
        s.families.push_back({dirs[k].first, dirs[k].second, dphi / (2.0 * len)});
    }
    return s;
}

double PerimeterScheme::directional_cost(double theta) const {
    double nx = -std::sin(theta), ny = std::cos(theta);
    double c = 0.0;
    for (const auto& f : families) c += f.weight * std::abs(f.dx * nx + f.dy * ny);
    return c;
}

int PerimeterScheme::reach() const {
    int r = 0;
    for (const auto& f : families) r = std::max({r, std::abs(f.dx), std::abs(f.dy)});
    return r;
}

const PerimeterScheme& default_scheme() {
    static const PerimeterScheme s = PerimeterScheme::make(16);
    return s;
}

double perimeter(const BinarySet& e, const PerimeterScheme& scheme) {
    const Grid& g = e.grid();
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!e.at(i, j)) continue;
            for (const auto& f : scheme.families) {
                if (!e.at(i + f.dx, j + f.dy)) total += f.weight;
                if (!e.at(i - f.dx, j - f.dy)) total += f.weight;
            }
        }
    return total * g.h;
}

Point BoundarySet::point(std::size_t k) const {
    return {grid.xmin() + 0.5 * grid.h * la[k], grid.ymin() + 0.5 * grid.h * lb[k]};
}

std::vector<Point> BoundarySet::points() const {
    std::vector<Point> p(size());
    for (std::size_t k = 0; k < size(); ++k) p[k] = point(k);
    return p;
}

BoundarySet boundary(const BinarySet& e) {
    const Grid& g = e.grid();
    BoundarySet b;
    b.grid = g;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            bool v = e.at(i, j);
            if (i + 1 < g.nx && e.at(i + 1, j) != v) {
                b.la.push_back(2 * i + 2);
                b.lb.push_back(2 * j + 1);
            }
            if (j + 1 < g.ny && e.at(i, j + 1) != v) {
                b.la.push_back(2 * i + 1);
                b.lb.push_back(2 * j + 2);
            }
        }
    return b;
}

namespace {

// Felzenszwalb-Huttenlocher lower envelope of parabolas, one line.
void dt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        auto meet = [&](int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
        double s = meet(v[k]);
        while (s <= z[k]) {
            --k;
            s = meet(v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& sites, int w, int h) {
    std::vector<double> out(static_cast<std::size_t>(w) * h, kFar);
    bool any = false;
    for (std::size_t k = 0; k < out.size(); ++k)
        if (sites[k]) {
            out[k] = 0.0;
            any = true;
        }
    if (!any) {
        std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
        return out;
    }
    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> f(std::max(w, h)), d(std::max(w, h));
    for (int i = 0; i < w; ++i) {
        for (int j = 0; j < h; ++j) f[j] = out[static_cast<std::size_t>(j) * w + i];
        dt_1d(f.data(), d.data(), h, v, z);
        for (int j = 0; j < h; ++j) out[static_cast<std::size_t>(j) * w + i] = d[j];
    }
    for (int j = 0; j < h; ++j) {
        double* row = out.data() + static_cast<std::size_t>(j) * w;
        std::copy(row, row + w, f.begin());
        dt_1d(f.data(), d.data(), w, v, z);
        std::copy(d.begin(), d.begin() + w, row);
    }
    return out;
}

namespace {

double directed_cells(const BinarySet& a, const std::vector<double>& dt_b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.mask().size(); ++k)
        if (a.mask()[k]) m = std::max(m, dt_b[k]);
    return std::sqrt(m);
}

std::vector<double> lattice_dt(const BoundarySet& b) {
    int w = 2 * b.grid.nx + 1, h = 2 * b.grid.ny + 1;
    std::vector<std::uint8_t> s(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t k = 0; k < b.size(); ++k) s[static_cast<std::size_t>(b.lb[k]) * w + b.la[k]] = 1;
    return squared_distance_transform(s, w, h);
}

double directed_lattice(const BoundarySet& a, const std::vector<double>& dt_b) {
    int w = 2 * a.grid.nx + 1;
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, dt_b[static_cast<std::size_t>(a.lb[k]) * w + a.la[k]]);
    return std::sqrt(m);
}

}  // namespace

double hausdorff(const BinarySet& a, const BinarySet& b) {
    require_same_grid(a.grid(), b.grid(), "hausdorff");
    require_nonempty(a, "hausdorff");
    require_nonempty(b, "hausdorff");
    const Grid& g = a.grid();
    auto dta = squared_distance_transform(a.mask(), g.nx, g.ny);
    auto dtb = squared_distance_transform(b.mask(), g.nx, g.ny);
    return g.h * std::max(directed_cells(a, dtb), directed_cells(b, dta));
}

double hausdorff(const BoundarySet& a, const BoundarySet& b) {
    require_same_grid(a.grid, b.grid, "hausdorff");
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "hausdorff: empty boundary");
    auto dta = lattice_dt(a);
    auto dtb = lattice_dt(b);
    return 0.5 * a.grid.h * std::max(directed_lattice(a, dtb), directed_lattice(b, dta));
}

double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "hausdorff: empty point set");
    auto directed = [](const std::vector<Point>& p, const std::vector<Point>& q) {
        double m = 0.0;
        for (const auto& x : p) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& y : q) best = std::min(best, (x.x - y.x) * (x.x - y.x) + (x.y - y.y) * (x.y - y.y));
            m = std::max(m, best);
        }
        return std::sqrt(m);
    };
    return std::max(directed(a, b), directed(b, a));
}

ScalarField distance_to_boundary(const BinarySet& e) {
    const Grid& g = e.grid();
    auto dt = lattice_dt(boundary(e));
    int w = 2 * g.nx + 1;
    ScalarField d(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d[g.index(i, j)] = 0.5 * g.h * std::sqrt(dt[static_cast<std::size_t>(2 * j + 1) * w + 2 * i + 1]);
    return d;
}

HausdorffBoundReport boundary_hausdorff_bound_check(const BinarySet& e, const BinarySet& f) {
    BinarySet ec = e.complement(), fc = f.complement();
    for (const BinarySet* s : std::initializer_list<const BinarySet*>{&e, &f, &ec, &fc}) require_nonempty(*s, "boundary_hausdorff_bound_check");
    HausdorffBoundReport r;
    r.d_boundary = hausdorff(boundary(e), boundary(f));
    r.d_sets = hausdorff(e, f);
    r.d_complements = hausdorff(ec, fc);
    r.slack = 2.0 * e.grid().h;
    r.holds = r.d_boundary <= std::max(r.d_sets, r.d_complements) + r.slack;
    return r;
}

DensityProfile density_profile(const BinarySet& e, const std::vector<double>& radii) {
    BoundarySet b = boundary(e);
    return density_profile(e, radii, b, std::vector<std::uint8_t>(b.size(), 1));
}

DensityProfile density_profile(const BinarySet& e, const std::vector<double>& radii, const BoundarySet& pts,
                               const std::vector<std::uint8_t>& keep) {
    require_nonempty(e, "density_profile");
    require_nonempty(e.complement(), "density_profile");
    const Grid& g = e.grid();
    DensityProfile prof;
    for (std::size_t ri = 0; ri + 1 < radii.size(); ++ri)
        if (!(radii[ri] < radii[ri + 1])) throw Error(ErrorCode::InvalidArgument, "radii must increase");
    for (double r : radii) {
        // lattice offsets from an edge midpoint to cell centers, for both edge orientations
        double R = 2.0 * r / g.h;
        int m = static_cast<int>(std::ceil(R)) + 1;
        std::vector<std::pair<int, int>> off_v, off_h;
        for (int db = -m; db <= m; ++db)
            for (int da = -m; da <= m; ++da) {
                if (double(da) * da + double(db) * db > R * R) continue;
                bool aodd = (da & 1) != 0, bodd = (db & 1) != 0;
                if (aodd && !bodd) off_v.push_back({da, db});
                if (!aodd && bodd) off_h.push_back({da, db});
            }
        double inner = 1.0, outer = 1.0;
        bool any = false;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (!keep[k]) continue;
            const auto& off = (pts.la[k] % 2 == 0) ? off_v : off_h;
            if (off.empty()) continue;
            std::size_t in = 0;
            for (const auto& [da, db] : off) {
                int i = (pts.la[k] + da - 1) / 2, j = (pts.lb[k] + db - 1) / 2;
                if (e.at(i, j)) ++in;
            }
            double frac = double(in) / double(off.size());
            inner = std::min(inner, frac);
            outer = std::min(outer, 1.0 - frac);
            any = true;
        }
        prof.radii.push_back(r);
        prof.inner_min.push_back(any ? inner : 1.0);
        prof.outer_min.push_back(any ? outer : 1.0);
    }
    return prof;
}

namespace {

using P64 = std::pair<long long, long long>;

long long cross(const P64& o, const P64& a, const P64& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

}  // namespace

BinarySet convex_hull(const BinarySet& e) {
    require_nonempty(e, "convex_hull");
    const Grid& g = e.grid();
    std::vector<P64> pts;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (e.at(i, j)) pts.push_back({i, j});
    std::sort(pts.begin(), pts.end());
    std::vector<P64> hull;
    if (pts.size() <= 2) {
        hull = pts;
    } else {
        std::vector<P64> hh(2 * pts.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            while (k >= 2 && cross(hh[k - 2], hh[k - 1], pts[i]) <= 0) --k;
            hh[k++] = pts[i];
        }
        for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
            while (k >= t && cross(hh[k - 2], hh[k - 1], pts[i - 1]) <= 0) --k;
            hh[k++] = pts[i - 1];
        }
        hh.resize(k - 1);
        hull = hh;
    }
    long long x0 = pts.front().first, x1 = pts.back().first, y0 = pts.front().second, y1 = y0;
    for (const auto& p : pts) {
        y0 = std::min(y0, p.second);
        y1 = std::max(y1, p.second);
    }
    BinarySet out(g);
    for (long long j = y0; j <= y1; ++j)
        for (long long i = x0; i <= x1; ++i) {
            P64 q{i, j};
            bool in = true;
            if (hull.size() == 1) {
                in = (q == hull[0]);
            } else if (hull.size() == 2) {
                in = cross(hull[0], hull[1], q) == 0 && std::min(hull[0].first, hull[1].first) <= i &&
                     i <= std::max(hull[0].first, hull[1].first) && std::min(hull[0].second, hull[1].second) <= j &&
                     j <= std::max(hull[0].second, hull[1].second);
            } else {
                for (std::size_t a = 0; a < hull.size() && in; ++a)
                    if (cross(hull[a], hull[(a + 1) % hull.size()], q) < 0) in = false;
            }
            if (in) out.set(static_cast<int>(i), static_cast<int>(j), true);
        }
    return out;
}

BinarySet rasterize_disk(const Grid& g, Point c, double r) {
    BinarySet e(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            Point p = g.center(i, j);
            if ((p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y) < r * r) e.set(i, j, true);
        }
    return e;
}

BinarySet rasterize_rect(const Grid& g, double x0, double y0, double x1, double y1) {
    BinarySet e(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            Point p = g.center(i, j);
            if (p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1) e.set(i, j, true);
        }
    return e;
}

BinarySet rasterize_polygon(const Grid& g, const std::vector<Point>& poly) {
    BinarySet e(g);
    const std::size_t n = poly.size();
    if (n < 3) return e;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            Point p = g.center(i, j);
            bool in = false;
            for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
                const Point& pa = poly[a];
                const Point& pb = poly[b];
                if ((pa.y > p.y) != (pb.y > p.y)) {
                    double xc = pa.x + (p.y - pa.y) * (pb.x - pa.x) / (pb.y - pa.y);
                    if (p.x < xc) in = !in;
                }
            }
            if (in) e.set(i, j, true);
        }
    return e;
}

std::vector<int> connected_components(const BinarySet& e, const PerimeterScheme& scheme, int* count) {
    const Grid& g = e.grid();
    std::vector<int> lab(g.size(), -1);
    int n = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (!e[s] || lab[s] >= 0) continue;
        lab[s] = n;
        stack.push_back(s);
        while (!stack.empty()) {
            std::size_t k = stack.back();
            stack.pop_back();
            int i = g.col(k), j = g.row(k);
            for (const auto& f : scheme.families)
                for (int sg : {1, -1}) {
                    int a = i + sg * f.dx, b = j + sg * f.dy;
                    if (!e.at(a, b)) continue;
                    std::size_t q = g.index(a, b);
                    if (lab[q] < 0) {
                        lab[q] = n;
                        stack.push_back(q);
                    }
                }
        }
        ++n;
    }
    if (count) *count = n;
    return lab;
}

}  // namespace tvl
