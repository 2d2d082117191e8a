#pragma once

// Polaron master equation of the four-level dot in a two-mode cavity.
//
// Generator conventions: every dissipative channel (C, r) contributes
// r (C rho C^dag - 1/2 {C^dag C, rho}); the phonon term contributes
// -sum_j ([X_j, Xt_j rho] + h.c.) with Xt_j = ∫ G_j(tau) X_j(-tau) dtau.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdl/operators.hpp"
#include "qdl/phonon.hpp"
#include "qdl/superoperator.hpp"

namespace qdl {

struct IncoherentPump {
  double eta_1 = 0.5;
  double eta_2 = 0.5;
};

struct CoherentPump {
  double omega_1 = 2.0;
  double omega_2 = 2.0;
  double delta_p = 0.0;
};

enum class PumpScheme { incoherent, coherent };
enum class ModelForm { full, effective };

std::string to_string(PumpScheme scheme);
std::string to_string(ModelForm form);

/// Every model parameter. Defaults are the two-photon-resonant incoherent
/// working point (kappa = 0.1, gamma = 0.01, Delta_xx = 15, delta_x = -1,
/// Delta_1 = -Delta_2 = 5, eta = 0.5, T = 5 K), all in units of g.
struct SystemParams {
  double g1 = 1.0;
  double g2 = 1.0;
  double delta_x = -1.0;
  double Delta_xx = 15.0;
  double Delta_1 = 5.0;
  double Delta_2 = -5.0;
  double kappa_1 = 0.1;
  double kappa_2 = 0.1;
  double gamma_1 = 0.01;
  double gamma_2 = 0.01;
  double gamma_d = 0.01;
  std::variant<IncoherentPump, CoherentPump> pump = IncoherentPump{};
  PhononBathParams bath = default_bath(5.0);
  SpaceLayout layout{6, 6};
  OmegaPPrefactor omega_p_prefactor = OmegaPPrefactor::rabi;

  PumpScheme scheme() const {
    return std::holds_alternative<IncoherentPump>(pump) ? PumpScheme::incoherent : PumpScheme::coherent;
  }
  const IncoherentPump& incoherent() const;
  const CoherentPump& coherent() const;
  void validate() const;
};

ComplexOperator hamiltonian_incoherent(const SystemParams& p);
ComplexOperator hamiltonian_incoherent(const SystemParams& p, double b_avg);
ComplexOperator hamiltonian_coherent(const SystemParams& p);
ComplexOperator hamiltonian_coherent(const SystemParams& p, double b_avg);

/// Y = g1 s_yg a1 + g2 s_uy a2 (+ Omega1 s_xg + Omega2 s_ux when coherent);
/// X_g = Y + Y^dag, X_u = i Y - i Y^dag.
struct PhononCouplings {
  ComplexOperator x_g;
  ComplexOperator x_u;
};
PhononCouplings phonon_couplings(const SystemParams& p);

/// Conserved labels per basis state. Q = n1 - n2 + [level == y] is conserved
/// by every term of both schemes; the incoherent scheme also conserves the
/// excitation number N = n1 + n2 + exc(level). Steady states live in the
/// sector of pairs (i, j) with equal labels.
std::vector<long> symmetry_labels(const SystemParams& p);

/// Spectral evaluation of the phonon term: per label block, H is
/// diagonalized, (X_j)_ab in the eigenbasis is weighted by K_j(E_b - E_a),
/// and the result is returned as sandwich terms. `labels` may be empty
/// (one dense block).
SandwichList polaron_terms(const ComplexOperator& h_s, const ComplexOperator& x_g, const ComplexOperator& x_u,
                           const PhononKernels& kernels, const std::vector<long>& labels = {},
                           Execution exec = Execution::parallel);

Superoperator polaron_dissipator(const ComplexOperator& h_s, const ComplexOperator& x_g, const ComplexOperator& x_u,
                                 const PhononKernels& kernels, BasisPtr basis = nullptr,
                                 Execution exec = Execution::parallel);

/// Brute-force reference: Xt_j by direct tau quadrature of
/// G_j(tau) e^{-iH tau} X_j e^{iH tau} with matrix exponentials. Small D only.
Superoperator polaron_dissipator_time_domain(const ComplexOperator& h_s, const ComplexOperator& x_g,
                                             const ComplexOperator& x_u, const PhononKernels& kernels,
                                             double tau_max, int steps);

struct Channel {
  std::string label;
  ComplexOperator op;
  double rate;
};

std::vector<Channel> lindblad_channels(const SystemParams& p);

/// One labeled contribution to the generator (used by the flux ledger).
struct GeneratorTerm {
  std::string label;
  SandwichList terms;
};

struct LiouvillianBundle {
  Superoperator generator;
  ComplexOperator hamiltonian;
  std::vector<Channel> channels;
  std::vector<GeneratorTerm> terms;
  ModelForm form;
  PumpScheme scheme;
  SystemParams params;
  double b_avg = 1.0;
  std::vector<std::string> warnings;
};

struct BuildOptions {
  bool full_space = false;  // keep all D^2 pairs instead of the symmetry sector
  Execution exec = Execution::parallel;
};

LiouvillianBundle build_full_liouvillian(const SystemParams& p, const PhononKernels& kernels,
                                         const BuildOptions& options = {});
LiouvillianBundle build_effective_liouvillian_incoherent(const SystemParams& p, const EffectiveRates& r,
                                                         double b_avg, const BuildOptions& options = {});
LiouvillianBundle build_effective_liouvillian_coherent(const SystemParams& p, const EffectiveRatesCoherent& rp,
                                                       const EffectiveRates& r, double b_avg,
                                                       const BuildOptions& options = {});

/// Dispatch on scheme and form; computes the effective rates from `kernels`.
LiouvillianBundle build_liouvillian(const SystemParams& p, ModelForm form, const PhononKernels& kernels,
                                    const BuildOptions& options = {});

}  // namespace qdl
