#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tvl/geometry.hpp"

namespace tvl {

// What the cells beyond the grid border count as.
enum class Border { Outside, Inside, Free };

enum class Select { Minimal, Maximal };

// Binary energies  sum_{p in E} unary[p] + sum over cut edges of w_e  on a grid.
// Solves restricted problems where only a subset of cells is free; every
// other cell has a fixed state.
class GridCutter {
public:
    GridCutter(const Grid& g, const PerimeterScheme& scheme);

    // unary is indexed like free_cells; fixed_in[q] gives the state of q for q
    // not in free_cells. Returns membership per free cell.
    std::vector<std::uint8_t> solve(const std::vector<std::size_t>& free_cells, const std::vector<double>& unary,
                                    const std::vector<std::uint8_t>& fixed_in, Border border, Select sel,
                                    double* flow = nullptr);

    const Grid& grid() const { return grid_; }
    const PerimeterScheme& scheme() const { return scheme_; }

private:
    Grid grid_;
    PerimeterScheme scheme_;
    std::vector<int> node_;
};

// A family of K binary problems whose maximal minimizers are nested.
// grows = true: set k is contained in set k+1; otherwise set k+1 is contained in set k.
struct NestedProblem {
    int count = 0;
    bool grows = true;
    std::function<double(int k, std::size_t cell)> unary;
    std::function<Border(int k)> border;
};

// Solves every member by divide and conquer on the index, fixing cells that
// the median solve has already decided. Cells outside free_cells keep state[q].
// Returns a rank per cell: with grows, cell is in set k iff k >= rank;
// otherwise cell is in set k iff k < rank.
std::vector<int> solve_nested(GridCutter& cutter, const NestedProblem& prob, const std::vector<std::size_t>& free_cells,
                              std::vector<std::uint8_t> state);

// Full energy of e: sum of unary over e plus weighted cut length with the given border.
double cut_energy(const BinarySet& e, const std::vector<double>& unary, const PerimeterScheme& scheme, Border border);

// Cut length with the given border convention (Outside gives perimeter()).
double cut_length(const BinarySet& e, const PerimeterScheme& scheme, Border border);

}  // namespace tvl
