#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qdl/config.hpp"
#include "qdl/observables.hpp"
#include "qdl/steady_state.hpp"

namespace qdl {

enum class RowStatus { ok, failed };

struct ResultRow {
  double axis_value = 0.0;
  RowStatus status = RowStatus::ok;
  std::string message;

  double pop_g = 0, pop_x = 0, pop_y = 0, pop_u = 0;
  double n1 = 0, n2 = 0;
  std::optional<double> F1, F2, g2_1, g2_2, g2_12;
  std::optional<double> single1_net, single2_net, twophoton_net;  // effective form only
  double variance_sum = 0;  // at the configured phases
  double variance_min = 0;  // over the phase-sum scan
  double residual = 0;
  double trace_error = 0;
  double min_eigenvalue = 0;
  int n_max1 = 0, n_max2 = 0;
  bool converged = false;
  double convergence_change = 0;
  std::vector<std::string> warnings;

  /// Value of a column from output_labels(); nullopt when undefined.
  std::optional<double> value(const std::string& label) const;
};

/// Phonon kernels keyed by bath parameters; safe for concurrent use.
class KernelCache {
 public:
  std::shared_ptr<const PhononKernels> get(const PhononBathParams& bath);
  std::size_t size() const;

 private:
  using Key = std::tuple<double, double, double, double>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const PhononKernels>> cache_;
};

/// Solves one parameter point (with truncation escalation when enabled) and
/// fills every column. Solver failures are recorded in the row.
ResultRow solve_point(const RunConfig& cfg, const SystemParams& p, const PhononKernels& kernels, double axis_value);

struct SweepOptions {
  int workers = 0;        // 0: take cfg.workers
  bool cache_kernels = true;
};

/// One row per axis value, in axis order. Without a sweep the base point is
/// solved once (axis value 0).
std::vector<ResultRow> run_sweep(const RunConfig& cfg, const SweepOptions& options = {});

/// Frequency table of the half-Fourier kernels at the config's bath.
struct KernelTableRow {
  double omega;
  cplx k_g;
  cplx k_u;
};
std::vector<KernelTableRow> kernel_table(const PhononKernels& kernels, double omega_min, double omega_max,
                                         int points);

/// 0 all rows ok, 3 every row failed, 4 some rows failed.
int sweep_exit_code(const std::vector<ResultRow>& rows);

}  // namespace qdl
