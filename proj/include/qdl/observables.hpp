#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdl/model.hpp"
#include "qdl/operators.hpp"

namespace qdl {

/// Joint photon-number distribution P(n, m) = sum_i <i,n,m|rho|i,n,m>.
struct PhotonDistribution {
  Eigen::MatrixXd p;  // (n_max1 + 1) x (n_max2 + 1)

  double total() const { return p.sum(); }
  double mean(int mode) const;
  /// <n (n - 1)> from the marginal.
  double factorial_moment(int mode) const;
  double second_moment(int mode) const;
  double cross_moment() const;  // sum n m P(n, m)
};

PhotonDistribution photon_number_distribution(const DensityMatrix& rho);

/// Mean photon numbers below this leave g2 and Fano undefined.
inline constexpr double kVacuumThreshold = 1e-10;

struct ObservableSet {
  double pop_g = 0, pop_x = 0, pop_y = 0, pop_u = 0;
  double n1 = 0, n2 = 0;
  std::optional<double> F1, F2;
  std::optional<double> g2_1, g2_2, g2_12;
  PhotonDistribution P_nm;
};

ObservableSet compute_observables(const DensityMatrix& rho);

/// Scalar observable by label: pop_g, pop_x, pop_y, pop_u, n1, n2, F1, F2,
/// g2_1, g2_2, g2_12 (nullopt when undefined).
std::optional<double> observable_value(const ObservableSet& obs, const std::string& label);
const std::vector<std::string>& observable_labels();

struct FluxEntry {
  std::string label;
  double mode1 = 0;
  double mode2 = 0;
};

struct EmissionRates {
  double single1_net = 0;
  double single2_net = 0;
  double twophoton_net = 0;
  std::vector<FluxEntry> ledger;
  double balance_residual = 0;  // max_i |sum of non-leak fluxes - kappa_i <n_i>|
};

/// Per-term photon fluxes Tr[n_i t(rho)] of an effective-form bundle.
/// Singles: coupling_i, Gamma_plus_i, Gamma_minus_i. Pairs: omega_12,
/// Gamma_ug, Gamma_gu (mode-1 flux, equal to the mode-2 flux).
EmissionRates emission_rate_decomposition(const LiouvillianBundle& bundle, const DensityMatrix& rho,
                                          double balance_tol = 1e-6);

struct EntanglementWitness {
  double phi1 = -0.5;
  double phi2 = -0.5;
  double variance_sum = 2.0;
  bool entangled = false;
};

/// Delta u^2 + Delta v^2 for u = x1 + x2, v = p1 - p2 with quadrature phases.
EntanglementWitness dgcz_variance(const DensityMatrix& rho, double phi1 = -0.5, double phi2 = -0.5);

/// Minimum over phi1 + phi2 on a uniform grid of `points` values in [0, 2 pi).
EntanglementWitness dgcz_phase_scan(const DensityMatrix& rho, int points = 256);

}  // namespace qdl
