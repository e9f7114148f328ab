#pragma once

#include <cstdint>
#include <vector>

namespace cedf {

// Dyadic grid on [0,1)^d at depth p: nodes s_{j} = 2^{-p} j per axis
// (indices 0..2^p), half-open cells C_j = prod_a [2^{-p}(j_a), 2^{-p}(j_a+1))
// with cell indices 0..2^p-1 per axis. Cells partition [0,1)^d and each has
// Lebesgue measure 2^{-pd}.
struct DyadicGrid {
  int d = 1;
  int p = 1;

  DyadicGrid() = default;
  DyadicGrid(int dim, int depth);

  std::uint64_t cells_per_axis() const { return std::uint64_t{1} << p; }
  std::uint64_t nodes_per_axis() const { return cells_per_axis() + 1; }
  std::uint64_t cell_count() const;
  std::uint64_t node_count() const;
  double cell_measure() const;  // 2^{-pd}

  // Linear indexing, axis 0 fastest: linear = sum_a idx_a * (2^p)^a.
  std::uint64_t cell_linear(const std::vector<std::uint64_t>& idx) const;
  std::vector<std::uint64_t> cell_multi(std::uint64_t linear) const;
  std::uint64_t node_linear(const std::vector<std::uint64_t>& idx) const;
  std::vector<std::uint64_t> node_multi(std::uint64_t linear) const;

  bool operator==(const DyadicGrid& o) const { return d == o.d && p == o.p; }
};

// Function [0,1)^d -> R^k stored by its cell increments on a dyadic grid.
// The cumulative view at a node s is the sum of increments of all cells
// contained in [0,s); g(0) = 0 by construction. Both views stay consistent
// because the cumulative is always derived from the increments.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(DyadicGrid grid, int k);

  const DyadicGrid& grid() const { return grid_; }
  int k() const { return k_; }

  // Cell-increment view (k components per cell, cell-major storage).
  double* cell(std::uint64_t linear) { return data_.data() + linear * static_cast<std::uint64_t>(k_); }
  const double* cell(std::uint64_t linear) const {
    return data_.data() + linear * static_cast<std::uint64_t>(k_);
  }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  // Deposit weight*y into the cell containing w in [0,1)^d; points outside
  // the unit cube are ignored (they are outside every [0,s)).
  void add_point(const std::vector<double>& w, const std::vector<double>& y, double weight);

  // Cumulative values at every node (node-major, k components per node).
  std::vector<double> cumulative_nodes() const;
  // Cumulative value at one node multi-index (entries in 0..2^p).
  std::vector<double> cumulative_at(const std::vector<std::uint64_t>& node) const;
  // Total mass = cumulative at s = 1 (vector in R^k).
  std::vector<double> total() const;

  // sup over grid nodes of the Euclidean norm |g(s)|_k.
  double sup_norm() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator*=(double a);

  bool same_shape(const GridFunction& o) const { return grid_ == o.grid_ && k_ == o.k_; }

 private:
  DyadicGrid grid_;
  int k_ = 1;
  std::vector<double> data_;  // cell_count * k
};

// Depth-q coarsening: child-cell increments are summed into their parent
// cell; identity at q = p. Throws domain error (std::invalid_argument) when
// q exceeds the function's depth.
GridFunction discretize(const GridFunction& g, int q);

// sup over common grid nodes of |a(s) - b(s)|_k (grids must match).
double sup_node_distance(const GridFunction& a, const GridFunction& b);

}  // namespace cedf
