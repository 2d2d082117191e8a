#pragma once

// Phonon bath quantities for the polaron master equation.
//
// Frequencies are in units of the cavity coupling g (hbar = 1), times in 1/g.
// Temperature enters only through  hbar*omega / (2 k_B T); converting the
// temperature into g units needs the absolute size of g, `g1_absolute`
// (rad/ps), which calibrate_absolute_scale() fixes from the target <B>(5 K).

#include <span>
#include <vector>

#include "qdl/operators.hpp"
#include "qdl/superoperator.hpp"

namespace qdl {

/// hbar / k_B in K * ps.
inline constexpr double kHbarOverKb = 7.638232577577;

struct PhononBathParams {
  double alpha_p = 1.42e-3;  // 1/g^2
  double omega_b = 10.0;     // g
  double temperature = 5.0;  // K
  double g1_absolute = 0.0;  // rad/ps; <= 0 means "not calibrated"

  void validate() const;
  bool calibrated() const { return g1_absolute > 0.0; }
  /// k_B T / hbar in units of g (0 at T = 0).
  double thermal_energy() const;
  /// Upper limit of every frequency-domain integral.
  double omega_cutoff() const { return 8.0 * omega_b; }
};

/// J(w) = alpha_p w^3 exp(-w^2 / 2 w_b^2).
double spectral_density(double omega, const PhononBathParams& params);

/// <B> = exp(-1/2 ∫ J(w)/w^2 coth(w / 2 k_B T) dw).
double displacement_average(const PhononBathParams& params);

/// phi(tau) = ∫ J(w)/w^2 [coth(w / 2 k_B T) cos(w tau) - i sin(w tau)] dw,
/// evaluated directly (adaptive quadrature for the thermal part).
cplx correlation_phi(double tau, const PhononBathParams& params);

/// Root-finds g1_absolute such that <B>(temperature_ref) == target_b.
/// The returned params keep the caller's temperature.
PhononBathParams calibrate_absolute_scale(PhononBathParams params, double target_b = 0.90,
                                          double temperature_ref = 5.0);

/// Calibrated default bath at the given temperature (calibration cached).
PhononBathParams default_bath(double temperature);

enum class Kernel { g, u };

struct KernelGridOptions {
  int fine_panels = 2048;          // uniform panels on [0, fine_extent]
  double fine_extent_cutoffs = 20; // fine_extent = this / omega_b
  double growth = 1.05;            // geometric panel growth beyond fine_extent
  double decay_tolerance = 1e-13;  // stop once |phi| and |tau phi'| drop below this
  double tau_cap = 1e6;            // hard stop (power-law tail at T = 0)
};

/// Precomputed bath kernels: <B>, phi(tau) table and the half-Fourier
/// transforms  K_j(w) = ∫_0^∞ G_j(tau) e^{i w tau} dtau  of the polaron
/// Green functions  G_g = <B>^2 (cosh phi - 1),  G_u = <B>^2 sinh phi.
///
/// The transforms integrate the cubic Hermite interpolant of G_j exactly
/// against e^{i w tau} (Filon-type), so they hold for any w.
class PhononKernels {
 public:
  explicit PhononKernels(const PhononBathParams& params, const KernelGridOptions& options = {});

  const PhononBathParams& params() const { return params_; }
  double displacement_average() const { return b_avg_; }
  double tau_max() const { return tau_.back(); }
  std::span<const double> tau_nodes() const { return tau_; }
  std::span<const cplx> phi_nodes() const { return phi_; }

  /// Interpolated phi(tau); zero beyond tau_max.
  cplx phi(double tau) const;
  cplx green(Kernel kernel, double tau) const;

  cplx half_fourier(Kernel kernel, double omega) const;
  /// Both transforms for many frequencies; OpenMP over frequencies when parallel.
  void half_fourier(std::span<const double> omegas, std::span<cplx> k_g, std::span<cplx> k_u,
                    Execution exec = Execution::parallel) const;

  /// ∫_0^∞ (e^{phi} - 1) e^{i w tau} dtau  = (K_g + K_u) / <B>^2
  cplx emission_integral(double omega) const;
  /// ∫_0^∞ (e^{-phi} - 1) e^{i w tau} dtau = (K_g - K_u) / <B>^2
  cplx absorption_integral(double omega) const;

 private:
  void half_fourier_one(double omega, cplx& k_g, cplx& k_u) const;

  PhononBathParams params_;
  double b_avg_ = 1.0;
  std::vector<double> tau_;
  std::vector<cplx> phi_, dphi_;
  std::vector<cplx> gg_, dgg_, gu_, dgu_;
  int fine_panels_ = 0;
  double fine_step_ = 0.0;
};

/// Phonon-induced shifts, rates and two-photon couplings of the large-detuning
/// effective master equation (incoherent pumping, cavity transitions).
struct EffectiveRates {
  double delta_plus_1 = 0, delta_minus_1 = 0, delta_plus_2 = 0, delta_minus_2 = 0;
  double gamma_plus_1 = 0, gamma_minus_1 = 0, gamma_plus_2 = 0, gamma_minus_2 = 0;
  cplx omega_12{}, gamma_ug{}, gamma_gu{};
  cplx beta_1{}, beta_2{};
};

EffectiveRates effective_rates_incoherent(double g1, double g2, double delta_1, double delta_2,
                                          const PhononKernels& kernels);

/// Prefactor used in the pump-induced two-photon coupling Omega^p.
enum class OmegaPPrefactor {
  rabi,          // Omega_1 * Omega_2
  cavity_frame,  // product of the two cavity-mode frame frequencies
};

/// Pump-transition counterparts (p-superscripted quantities).
struct EffectiveRatesCoherent {
  double delta_p_plus_1 = 0, delta_p_minus_1 = 0, delta_p_plus_2 = 0, delta_p_minus_2 = 0;
  double gamma_p_plus_1 = 0, gamma_p_minus_1 = 0, gamma_p_plus_2 = 0, gamma_p_minus_2 = 0;
  cplx omega_p{}, gamma_p_ug{}, gamma_p_gu{};
  cplx alpha_1{}, alpha_2{};
  double delta_p_prime = 0;  // omega_u - omega_x - omega_p
};

/// `cavity_frame_product` is only read for OmegaPPrefactor::cavity_frame.
EffectiveRatesCoherent effective_rates_coherent(double omega_1, double omega_2, double delta_p,
                                                double delta_xx, double delta_x,
                                                const PhononKernels& kernels,
                                                OmegaPPrefactor prefactor = OmegaPPrefactor::rabi,
                                                double cavity_frame_product = 0.0);

}  // namespace qdl
