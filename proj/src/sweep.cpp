#include "qdl/sweep.hpp"

#include <cmath>

#include <omp.h>

namespace qdl {

std::optional<double> ResultRow::value(const std::string& label) const {
  if (label == "pop_g") return pop_g;
  if (label == "pop_x") return pop_x;
  if (label == "pop_y") return pop_y;
  if (label == "pop_u") return pop_u;
  if (label == "n1") return n1;
  if (label == "n2") return n2;
  if (label == "F1") return F1;
  if (label == "F2") return F2;
  if (label == "g2_1") return g2_1;
  if (label == "g2_2") return g2_2;
  if (label == "g2_12") return g2_12;
  if (label == "single1_net") return single1_net;
  if (label == "single2_net") return single2_net;
  if (label == "twophoton_net") return twophoton_net;
  if (label == "variance_sum") return variance_sum;
  if (label == "variance_min") return variance_min;
  throw InvalidArgument("unknown result column '" + label + "'");
}

std::shared_ptr<const PhononKernels> KernelCache::get(const PhononBathParams& bath) {
  const Key key{bath.alpha_p, bath.omega_b, bath.temperature, bath.g1_absolute};
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto k = std::make_shared<const PhononKernels>(bath);
  cache_.emplace(key, k);
  return k;
}

std::size_t KernelCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

ResultRow solve_point(const RunConfig& cfg, const SystemParams& p, const PhononKernels& kernels, double axis_value) {
  ResultRow row;
  row.axis_value = axis_value;
  try {
    BuildOptions build;
    build.exec = omp_get_num_threads() > 1 ? Execution::serial : Execution::parallel;
    SteadySolution s = [&] {
      if (!cfg.convergence.enabled) return solve_steady(build_liouvillian(p, cfg.model_form, kernels, build));
      ConvergenceOptions opts;
      opts.step = cfg.convergence.step;
      opts.max_n = cfg.convergence.max_n;
      opts.rel_tol = cfg.convergence.rel_tol;
      opts.build = build;
      return truncation_convergence(p, kernels, cfg.convergence.observables, cfg.model_form, opts);
    }();
    row.n_max1 = s.n_max1;
    row.n_max2 = s.n_max2;
    row.converged = s.converged;
    row.convergence_change = s.convergence_change;
    row.residual = s.residual;
    row.min_eigenvalue = s.min_eigenvalue;
    row.trace_error = std::abs(s.rho.trace() - 1.0);

    const ObservableSet o = compute_observables(s.rho);
    row.pop_g = o.pop_g;
    row.pop_x = o.pop_x;
    row.pop_y = o.pop_y;
    row.pop_u = o.pop_u;
    row.n1 = o.n1;
    row.n2 = o.n2;
    row.F1 = o.F1;
    row.F2 = o.F2;
    row.g2_1 = o.g2_1;
    row.g2_2 = o.g2_2;
    row.g2_12 = o.g2_12;
    row.variance_sum = dgcz_variance(s.rho, cfg.witness.phi1, cfg.witness.phi2).variance_sum;
    row.variance_min = dgcz_phase_scan(s.rho, cfg.witness.scan_points).variance_sum;

    if (cfg.model_form == ModelForm::effective) {
      SystemParams q = p;
      q.layout = s.rho.layout();
      const LiouvillianBundle b = build_liouvillian(q, cfg.model_form, kernels, build);
      row.warnings = b.warnings;
      const EmissionRates e = emission_rate_decomposition(b, s.rho);
      row.single1_net = e.single1_net;
      row.single2_net = e.single2_net;
      row.twophoton_net = e.twophoton_net;
    }
  } catch (const std::exception& e) {
    ResultRow failed;
    failed.axis_value = axis_value;
    failed.status = RowStatus::failed;
    failed.message = e.what();
    return failed;
  }
  return row;
}

std::vector<ResultRow> run_sweep(const RunConfig& cfg, const SweepOptions& options) {
  std::vector<double> values = cfg.sweep ? cfg.sweep->values() : std::vector<double>{0.0};
  const int n = static_cast<int>(values.size());
  std::vector<SystemParams> points(values.size(), cfg.base);
  if (cfg.sweep) {
    for (int i = 0; i < n; ++i) apply_axis(points[i], cfg.sweep->axis, values[i]);
  }

  // Kernels are built up front, once per distinct bath, in axis order.
  KernelCache cache;
  std::vector<std::shared_ptr<const PhononKernels>> kernels(values.size());
  std::vector<std::string> kernel_errors(values.size());
  if (options.cache_kernels) {
    for (int i = 0; i < n; ++i) {
      try {
        kernels[i] = cache.get(points[i].bath);
      } catch (const std::exception& e) {
        kernel_errors[i] = e.what();
      }
    }
  }

  std::vector<ResultRow> rows(values.size());
  const int workers = options.workers > 0 ? options.workers : cfg.workers;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int i = 0; i < n; ++i) {
    if (!kernel_errors[i].empty()) {
      rows[i].axis_value = values[i];
      rows[i].status = RowStatus::failed;
      rows[i].message = kernel_errors[i];
      continue;
    }
    try {
      std::shared_ptr<const PhononKernels> k = kernels[i];
      if (!k) k = std::make_shared<const PhononKernels>(points[i].bath);
      rows[i] = solve_point(cfg, points[i], *k, values[i]);
    } catch (const std::exception& e) {
      rows[i].axis_value = values[i];
      rows[i].status = RowStatus::failed;
      rows[i].message = e.what();
    }
  }
  return rows;
}

std::vector<KernelTableRow> kernel_table(const PhononKernels& kernels, double omega_min, double omega_max,
                                         int points) {
  if (points < 2 || !(omega_min < omega_max)) throw InvalidArgument("kernel table needs points >= 2 and min < max");
  std::vector<double> omegas(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) omegas[i] = omega_min + (omega_max - omega_min) * double(i) / double(points - 1);
  std::vector<cplx> kg(omegas.size()), ku(omegas.size());
  kernels.half_fourier(omegas, kg, ku, Execution::parallel);
  std::vector<KernelTableRow> out;
  out.reserve(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) out.push_back({omegas[i], kg[i], ku[i]});
  return out;
}

int sweep_exit_code(const std::vector<ResultRow>& rows) {
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status == RowStatus::failed;
  if (failed == 0) return 0;
  return failed == rows.size() ? 3 : 4;
}

}  // namespace qdl
