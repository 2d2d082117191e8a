#pragma once

#include <random>

#include "qdl/model.hpp"
#include "qdl/phonon.hpp"

namespace qdl::test {

inline SystemParams working_point(int n_max = 6, double temperature = 5.0) {
  SystemParams p;
  p.layout = SpaceLayout{n_max, n_max};
  p.bath = default_bath(temperature);
  return p;
}

inline SystemParams coherent_point(double omega, double delta_p, int n_max = 4, double temperature = 5.0) {
  SystemParams p = working_point(n_max, temperature);
  p.pump = CoherentPump{omega, omega, delta_p};
  return p;
}

inline const PhononKernels& kernels_at(double temperature) {
  static const PhononKernels k0(default_bath(0.0));
  static const PhononKernels k5(default_bath(5.0));
  static const PhononKernels k20(default_bath(20.0));
  if (temperature == 0.0) return k0;
  if (temperature == 5.0) return k5;
  return k20;
}

inline DenseMat random_matrix(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  DenseMat m(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline DenseMat random_density(int d, unsigned seed) {
  const DenseMat a = random_matrix(d, seed);
  DenseMat rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace qdl::test
