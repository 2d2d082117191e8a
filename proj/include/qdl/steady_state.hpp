#pragma once

#include <string>
#include <vector>

#include "qdl/model.hpp"
#include "qdl/operators.hpp"
#include "qdl/superoperator.hpp"

namespace qdl {

struct SteadySolution {
  DensityMatrix rho;
  double residual = 0;        // ||L rho|| / ||L||_F
  double min_eigenvalue = 0;
  int n_max1 = 0;
  int n_max2 = 0;
  bool converged = false;  // set by truncation_convergence
  std::string convergence_observable{};
  double convergence_change = 0;  // relative change at the last escalation step
};

struct SolveOptions {
  double residual_tol = 1e-8;
  double negativity_tol = 1e-6;
  double degeneracy_tol = 1e-10;  // relative to ||M||_F of the bordered system
};

/// Steady state of L rho = 0, Tr rho = 1: one diagonal-pair row of the
/// (sector-restricted) generator is replaced by the trace functional and the
/// system is solved by sparse LU. Throws SolverError on a non-unique steady
/// state, a residual above tolerance or negativity beyond tolerance.
SteadySolution solve_steady(const Superoperator& generator, const SolveOptions& options = {});
SteadySolution solve_steady(const LiouvillianBundle& bundle, const SolveOptions& options = {});

/// Upper estimate of the spectral norm by power iteration on L^dag L.
double spectral_norm_estimate(const Superoperator& generator, int iterations = 40);

/// Fixed-step RK4 integration of d rho / dt = L rho. Requires dt ||L|| < 0.1.
DensityMatrix time_evolve(const Superoperator& generator, const DensityMatrix& rho0, double t_final, double dt);
DensityMatrix time_evolve(const LiouvillianBundle& bundle, const DensityMatrix& rho0, double t_final, double dt);

/// Trace distance 1/2 ||a - b||_1.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct ConvergenceOptions {
  int step = 2;
  int max_n = 14;
  double rel_tol = 0.005;
  SolveOptions solve;
  BuildOptions build;
};

/// Solves at p.layout, then at n_max + step for both modes until every listed
/// observable changes by less than rel_tol (absolute changes below 1e-12
/// count as converged). Returns the finer solution of the converged pair.
/// Throws SolverError when max_n is reached first.
SteadySolution truncation_convergence(const SystemParams& p, const PhononKernels& kernels,
                                      const std::vector<std::string>& observables,
                                      ModelForm form = ModelForm::full, const ConvergenceOptions& options = {});
SteadySolution truncation_convergence(const SystemParams& p, const PhononKernels& kernels,
                                      const std::string& observable, ModelForm form = ModelForm::full,
                                      const ConvergenceOptions& options = {});

}  // namespace qdl
