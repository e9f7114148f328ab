#pragma once

#include <cstdint>
#include <vector>

#include "cedf/grid.hpp"
#include "cedf/model.hpp"

namespace cedf {

// One realization of the compound Poisson process
//   U(s) = sum_{j <= eta} 1_{[0,s)}(Z_j - z) Y_j,  eta ~ Poisson(mean),
// atoms i.i.d. from the model law. Locations are stored in absolute Z
// coordinates; the localizing window is z + h^{1/d} [0,1)^d.
struct CompoundPoissonRealization {
  double h = 0.0;
  double mean = 1.0;
  std::uint64_t eta = 0;     // number of atoms
  std::vector<double> ys;    // eta * k
  std::vector<double> locs;  // eta * d

  const double* y(std::uint64_t j) const { return ys.data() + j * y_stride; }
  const double* loc(std::uint64_t j) const { return locs.data() + j * loc_stride; }
  std::uint64_t y_stride = 1;
  std::uint64_t loc_stride = 1;
};

// Full sampler: eta ~ Poisson(mean), atoms from the unconditional law.
CompoundPoissonRealization sample_compound_poisson(const ModelSpec& model, double h, double mean,
                                                   std::uint64_t seed);

// Law-equivalent restriction to the window z + h^{1/d}[0,1)^d: atom count
// Poisson(mean * P(Z in window)), atoms conditionally inside. By Poisson
// thinning this is exactly the law of the full realization's inside atoms;
// it is the workhorse for large-n simulation where outside atoms would
// dominate the cost without ever entering any statistic.
CompoundPoissonRealization sample_compound_poisson_windowed(const ModelSpec& model, double h,
                                                            double mean, Rng& rng);

// (1/(n h f(z))) sum_i U_i(h^{1/d} s) on the dyadic grid S_p; n is the
// number of realizations. With absolute = true the atoms are compounded by
// their Euclidean norm |Y|_k instead (output has k = 1).
GridFunction poissonized_increment(const std::vector<CompoundPoissonRealization>& realizations,
                                   const ModelSpec& model, double h, int p, bool absolute = false);

}  // namespace cedf
