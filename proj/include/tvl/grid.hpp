#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvl {

enum class ErrorCode {
    EmptyInput,
    UnboundedBelow,
    DomainTooSmall,
    NonConvergence,
    NestednessViolation,
    EmptyLevelSet,
    RuleViolation,
    InvalidArgument,
    IoError,
    FormatError,
    GridMismatch,
    Usage,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& msg);
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

// Cell (i, j) has its center at origin + h*(i, j); i runs along x, j along y.
struct Grid {
    int nx = 0;
    int ny = 0;
    double h = 1.0;
    Point origin;

    Grid() = default;
    Grid(int nx_, int ny_, double h_, Point origin_);

    // n x n cells covering [lo, hi]^2.
    static Grid square(int n, double lo, double hi);

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    int col(std::size_t k) const { return static_cast<int>(k % nx); }
    int row(std::size_t k) const { return static_cast<int>(k / nx); }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
    Point center(int i, int j) const { return {origin.x + h * i, origin.y + h * j}; }
    Point center(std::size_t k) const { return center(col(k), row(k)); }
    double cell_area() const { return h * h; }
    double xmin() const { return origin.x - 0.5 * h; }
    double ymin() const { return origin.y - 0.5 * h; }
    double xmax() const { return origin.x + (nx - 0.5) * h; }
    double ymax() const { return origin.y + (ny - 0.5) * h; }

    bool operator==(const Grid& o) const;
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

class BinarySet {
public:
    BinarySet() = default;
    explicit BinarySet(const Grid& g, bool value = false);
    BinarySet(const Grid& g, std::vector<std::uint8_t> mask);

    const Grid& grid() const { return grid_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::vector<std::uint8_t>& mask() { return mask_; }

    bool operator[](std::size_t k) const { return mask_[k] != 0; }
    bool at(int i, int j) const { return grid_.inside(i, j) && mask_[grid_.index(i, j)] != 0; }
    void set(std::size_t k, bool v) { mask_[k] = v ? 1 : 0; }
    void set(int i, int j, bool v) { mask_[grid_.index(i, j)] = v ? 1 : 0; }

    std::size_t count() const;
    double area() const { return static_cast<double>(count()) * grid_.cell_area(); }
    bool empty() const { return count() == 0; }
    bool full() const { return count() == grid_.size(); }
    bool touches_border() const;

    BinarySet complement() const;
    BinarySet operator&(const BinarySet& o) const;
    BinarySet operator|(const BinarySet& o) const;
    BinarySet minus(const BinarySet& o) const;
    bool subset_of(const BinarySet& o) const;
    bool operator==(const BinarySet& o) const;
    bool operator!=(const BinarySet& o) const { return !(*this == o); }

private:
    Grid grid_;
    std::vector<std::uint8_t> mask_;
};

// Area of the symmetric difference.
double symmetric_difference_area(const BinarySet& a, const BinarySet& b);

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double value = 0.0);
    ScalarField(const Grid& g, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }
    double operator[](std::size_t k) const { return v_[k]; }
    double& operator[](std::size_t k) { return v_[k]; }
    std::size_t size() const { return v_.size(); }

    double min() const;
    double max() const;
    BinarySet above(double s) const;   // {x : v > s}
    BinarySet below(double s) const;   // {x : v < s}

    ScalarField operator+(const ScalarField& o) const;
    ScalarField operator-(const ScalarField& o) const;
    ScalarField scaled(double c) const;

private:
    Grid grid_;
    std::vector<double> v_;
};

ScalarField indicator(const BinarySet& e, double value = 1.0);

// Discrete L^p norm with cell-area weighting h^2.
double lp_norm(const ScalarField& f, double p);

}  // namespace tvl
