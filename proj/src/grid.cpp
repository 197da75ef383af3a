#include "tvl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace tvl {

const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::UnboundedBelow: return "UnboundedBelow";
        case ErrorCode::DomainTooSmall: return "DomainTooSmall";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::NestednessViolation: return "NestednessViolation";
        case ErrorCode::EmptyLevelSet: return "EmptyLevelSet";
        case ErrorCode::RuleViolation: return "RuleViolation";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::Usage: return "Usage";
    }
    return "Unknown";
}

Error::Error(ErrorCode c, const std::string& msg)
    : std::runtime_error(std::string(error_name(c)) + ": " + msg), code_(c) {}

Grid::Grid(int nx_, int ny_, double h_, Point origin_) : nx(nx_), ny(ny_), h(h_), origin(origin_) {
    if (nx <= 0 || ny <= 0 || !(h > 0.0) || !std::isfinite(h))
        throw Error(ErrorCode::InvalidArgument, "grid needs positive sizes and spacing");
}

Grid Grid::square(int n, double lo, double hi) {
    if (n <= 0 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "bad square grid extent");
    double h = (hi - lo) / n;
    return Grid(n, n, h, {lo + 0.5 * h, lo + 0.5 * h});
}

bool Grid::operator==(const Grid& o) const {
    auto close = [](double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * scale; };
    return nx == o.nx && ny == o.ny && close(h, o.h, h) && close(origin.x, o.origin.x, h) &&
           close(origin.y, o.origin.y, h);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw Error(ErrorCode::GridMismatch, std::string(what) + ": operands live on different grids");
}

BinarySet::BinarySet(const Grid& g, bool value) : grid_(g), mask_(g.size(), value ? 1 : 0) {}

BinarySet::BinarySet(const Grid& g, std::vector<std::uint8_t> mask) : grid_(g), mask_(std::move(mask)) {
    if (mask_.size() != grid_.size()) throw Error(ErrorCode::GridMismatch, "mask size does not match grid");
    for (auto& m : mask_) m = m ? 1 : 0;
}

std::size_t BinarySet::count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

bool BinarySet::touches_border() const {
    for (int i = 0; i < grid_.nx; ++i)
        if (at(i, 0) || at(i, grid_.ny - 1)) return true;
    for (int j = 0; j < grid_.ny; ++j)
        if (at(0, j) || at(grid_.nx - 1, j)) return true;
    return false;
}

BinarySet BinarySet::complement() const {
    BinarySet r(grid_);
    for (std::size_t k = 0; k < mask_.size(); ++k) r.mask_[k] = mask_[k] ? 0 : 1;
    return r;
}

BinarySet BinarySet::operator&(const BinarySet& o) const {
    require_same_grid(grid_, o.grid_, "intersection");
    BinarySet r(grid_);
    for (std::size_t k = 0; k < mask_.size(); ++k) r.mask_[k] = mask_[k] & o.mask_[k];
    return r;
}

BinarySet BinarySet::operator|(const BinarySet& o) const {
    require_same_grid(grid_, o.grid_, "union");
    BinarySet r(grid_);
    for (std::size_t k = 0; k < mask_.size(); ++k) r.mask_[k] = mask_[k] | o.mask_[k];
    return r;
}

BinarySet BinarySet::minus(const BinarySet& o) const {
    require_same_grid(grid_, o.grid_, "difference");
    BinarySet r(grid_);
    for (std::size_t k = 0; k < mask_.size(); ++k) r.mask_[k] = mask_[k] & (o.mask_[k] ^ 1);
    return r;
}

bool BinarySet::subset_of(const BinarySet& o) const {
    require_same_grid(grid_, o.grid_, "subset test");
    for (std::size_t k = 0; k < mask_.size(); ++k)
        if (mask_[k] && !o.mask_[k]) return false;
    return true;
}

bool BinarySet::operator==(const BinarySet& o) const { return grid_ == o.grid_ && mask_ == o.mask_; }

double symmetric_difference_area(const BinarySet& a, const BinarySet& b) {
    require_same_grid(a.grid(), b.grid(), "symmetric difference");
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.mask().size(); ++k) n += (a.mask()[k] != b.mask()[k]);
    return static_cast<double>(n) * a.grid().cell_area();
}

ScalarField::ScalarField(const Grid& g, double value) : grid_(g), v_(g.size(), value) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != grid_.size()) throw Error(ErrorCode::GridMismatch, "field size does not match grid");
}

double ScalarField::min() const { return v_.empty() ? 0.0 : *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return v_.empty() ? 0.0 : *std::max_element(v_.begin(), v_.end()); }

BinarySet ScalarField::above(double s) const {
    BinarySet r(grid_);
    for (std::size_t k = 0; k < v_.size(); ++k) r.set(k, v_[k] > s);
    return r;
}

BinarySet ScalarField::below(double s) const {
    BinarySet r(grid_);
    for (std::size_t k = 0; k < v_.size(); ++k) r.set(k, v_[k] < s);
    return r;
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
    require_same_grid(grid_, o.grid_, "field sum");
    ScalarField r(grid_);
    for (std::size_t k = 0; k < v_.size(); ++k) r.v_[k] = v_[k] + o.v_[k];
    return r;
}

ScalarField ScalarField::operator-(const ScalarField& o) const {
    require_same_grid(grid_, o.grid_, "field difference");
    ScalarField r(grid_);
    for (std::size_t k = 0; k < v_.size(); ++k) r.v_[k] = v_[k] - o.v_[k];
    return r;
}

ScalarField ScalarField::scaled(double c) const {
    ScalarField r(grid_);
    for (std::size_t k = 0; k < v_.size(); ++k) r.v_[k] = c * v_[k];
    return r;
}

ScalarField indicator(const BinarySet& e, double value) {
    ScalarField r(e.grid());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = e[k] ? value : 0.0;
    return r;
}

double lp_norm(const ScalarField& f, double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "norm exponent must be >= 1");
    double s = 0.0;
    if (std::isinf(p)) {
        for (double x : f.values()) s = std::max(s, std::abs(x));
        return s;
    }
    for (double x : f.values()) s += std::pow(std::abs(x), p);
    return std::pow(s * f.grid().cell_area(), 1.0 / p);
}

}  // namespace tvl
