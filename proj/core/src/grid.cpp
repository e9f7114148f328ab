#include "cedf/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace cedf {

DyadicGrid::DyadicGrid(int dim, int depth) : d(dim), p(depth) {
  if (d < 1) throw std::invalid_argument("DyadicGrid: d must be >= 1");
  if (p < 0) throw std::invalid_argument("DyadicGrid: p must be >= 0");
  if (p * d > 24) throw std::invalid_argument("DyadicGrid: p*d too large (cell count over 2^24)");
}

std::uint64_t DyadicGrid::cell_count() const {
  std::uint64_t n = 1;
  for (int a = 0; a < d; ++a) n *= cells_per_axis();
  return n;
}

std::uint64_t DyadicGrid::node_count() const {
  std::uint64_t n = 1;
  for (int a = 0; a < d; ++a) n *= nodes_per_axis();
  return n;
}

double DyadicGrid::cell_measure() const { return std::ldexp(1.0, -p * d); }

std::uint64_t DyadicGrid::cell_linear(const std::vector<std::uint64_t>& idx) const {
  if (static_cast<int>(idx.size()) != d) throw std::invalid_argument("cell_linear: wrong arity");
  std::uint64_t lin = 0;
  std::uint64_t stride = 1;
  for (int a = 0; a < d; ++a) {
    if (idx[a] >= cells_per_axis()) throw std::out_of_range("cell_linear: index out of range");
    lin += idx[a] * stride;
    stride *= cells_per_axis();
  }
  return lin;
}

std::vector<std::uint64_t> DyadicGrid::cell_multi(std::uint64_t linear) const {
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    idx[a] = linear % cells_per_axis();
    linear /= cells_per_axis();
  }
  return idx;
}

std::uint64_t DyadicGrid::node_linear(const std::vector<std::uint64_t>& idx) const {
  if (static_cast<int>(idx.size()) != d) throw std::invalid_argument("node_linear: wrong arity");
  std::uint64_t lin = 0;
  std::uint64_t stride = 1;
  for (int a = 0; a < d; ++a) {
    if (idx[a] >= nodes_per_axis()) throw std::out_of_range("node_linear: index out of range");
    lin += idx[a] * stride;
    stride *= nodes_per_axis();
  }
  return lin;
}

std::vector<std::uint64_t> DyadicGrid::node_multi(std::uint64_t linear) const {
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    idx[a] = linear % nodes_per_axis();
    linear /= nodes_per_axis();
  }
  return idx;
}

GridFunction::GridFunction(DyadicGrid grid, int k) : grid_(grid), k_(k) {
  if (k < 1) throw std::invalid_argument("GridFunction: k must be >= 1");
  data_.assign(grid_.cell_count() * static_cast<std::uint64_t>(k_), 0.0);
}

void GridFunction::add_point(const std::vector<double>& w, const std::vector<double>& y,
                             double weight) {
  if (static_cast<int>(w.size()) != grid_.d || static_cast<int>(y.size()) != k_) {
    throw std::invalid_argument("add_point: dimension mismatch");
  }
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(grid_.d));
  const double m = static_cast<double>(grid_.cells_per_axis());
  for (int a = 0; a < grid_.d; ++a) {
    if (!(w[a] >= 0.0 && w[a] < 1.0)) return;  // outside [0,1)^d: contributes to no [0,s)
    idx[a] = static_cast<std::uint64_t>(w[a] * m);
    if (idx[a] >= grid_.cells_per_axis()) idx[a] = grid_.cells_per_axis() - 1;
  }
  double* c = cell(grid_.cell_linear(idx));
  for (int j = 0; j < k_; ++j) c[j] += weight * y[j];
}

std::vector<double> GridFunction::cumulative_nodes() const {
  const std::uint64_t nodes = grid_.node_count();
  const std::uint64_t kk = static_cast<std::uint64_t>(k_);
  std::vector<double> cum(nodes * kk, 0.0);
  // Scatter cell increments to their upper-corner node (index + 1 per axis),
  // then prefix-sum along each axis; node value becomes the sum over the
  // half-open box [0, s).
  const std::uint64_t cells = grid_.cell_count();
  for (std::uint64_t c = 0; c < cells; ++c) {
    auto idx = grid_.cell_multi(c);
    for (auto& v : idx) ++v;
    const std::uint64_t nl = grid_.node_linear(idx);
    const double* src = cell(c);
    for (std::uint64_t j = 0; j < kk; ++j) cum[nl * kk + j] += src[j];
  }
  std::uint64_t stride = 1;
  for (int a = 0; a < grid_.d; ++a) {
    const std::uint64_t npa = grid_.nodes_per_axis();
    for (std::uint64_t n = 0; n < nodes; ++n) {
      const std::uint64_t coord = (n / stride) % npa;
      if (coord == 0) continue;
      const std::uint64_t prev = n - stride;
      for (std::uint64_t j = 0; j < kk; ++j) cum[n * kk + j] += cum[prev * kk + j];
    }
    stride *= npa;
  }
  return cum;
}

std::vector<double> GridFunction::cumulative_at(const std::vector<std::uint64_t>& node) const {
  std::vector<double> out(static_cast<std::size_t>(k_), 0.0);
  const std::uint64_t cells = grid_.cell_count();
  for (std::uint64_t c = 0; c < cells; ++c) {
    const auto idx = grid_.cell_multi(c);
    bool inside = true;
    for (int a = 0; a < grid_.d; ++a) {
      if (idx[a] + 1 > node[a]) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    const double* src = cell(c);
    for (int j = 0; j < k_; ++j) out[static_cast<std::size_t>(j)] += src[j];
  }
  return out;
}

std::vector<double> GridFunction::total() const {
  std::vector<double> out(static_cast<std::size_t>(k_), 0.0);
  const std::uint64_t cells = grid_.cell_count();
  for (std::uint64_t c = 0; c < cells; ++c) {
    const double* src = cell(c);
    for (int j = 0; j < k_; ++j) out[static_cast<std::size_t>(j)] += src[j];
  }
  return out;
}

double GridFunction::sup_norm() const {
  const auto cum = cumulative_nodes();
  const std::uint64_t nodes = grid_.node_count();
  const std::uint64_t kk = static_cast<std::uint64_t>(k_);
  double best = 0.0;
  for (std::uint64_t n = 0; n < nodes; ++n) {
    double s2 = 0.0;
    for (std::uint64_t j = 0; j < kk; ++j) {
      const double v = cum[n * kk + j];
      s2 += v * v;
    }
    if (s2 > best) best = s2;
  }
  return std::sqrt(best);
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!same_shape(o)) throw std::invalid_argument("GridFunction +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double a) {
  for (auto& v : data_) v *= a;
  return *this;
}

GridFunction discretize(const GridFunction& g, int q) {
  const int p = g.grid().p;
  if (q > p) throw std::invalid_argument("discretize: q must be <= p");
  if (q == p) return g;
  GridFunction out(DyadicGrid(g.grid().d, q), g.k());
  const std::uint64_t cells = g.grid().cell_count();
  const int shift = p - q;
  for (std::uint64_t c = 0; c < cells; ++c) {
    auto idx = g.grid().cell_multi(c);
    for (auto& v : idx) v >>= shift;
    double* dst = out.cell(out.grid().cell_linear(idx));
    const double* src = g.cell(c);
    for (int j = 0; j < g.k(); ++j) dst[j] += src[j];
  }
  return out;
}

double sup_node_distance(const GridFunction& a, const GridFunction& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("sup_node_distance: shape mismatch");
  const auto ca = a.cumulative_nodes();
  const auto cb = b.cumulative_nodes();
  const std::uint64_t nodes = a.grid().node_count();
  const std::uint64_t kk = static_cast<std::uint64_t>(a.k());
  double best = 0.0;
  for (std::uint64_t n = 0; n < nodes; ++n) {
    double s2 = 0.0;
    for (std::uint64_t j = 0; j < kk; ++j) {
      const double v = ca[n * kk + j] - cb[n * kk + j];
      s2 += v * v;
    }
    if (s2 > best) best = s2;
  }
  return std::sqrt(best);
}

}  // namespace cedf
