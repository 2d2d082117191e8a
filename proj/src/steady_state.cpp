#include "qdl/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/SparseLU>

#include "qdl/observables.hpp"

namespace qdl {

namespace {

using RealSparse = Eigen::SparseMatrix<double>;
using RealVec = Eigen::VectorXd;

// Real coordinates of a Hermitian operator on the sector: rho_ii, and
// (Re rho_ij, Im rho_ij) for i < j. x = T y, y = T^-1 x.
struct HermitianCoordinates {
  SparseMat to_pairs;    // T
  SparseMat from_pairs;  // T^-1
  std::vector<int> diagonal;
};

HermitianCoordinates hermitian_coordinates(const LiouvilleBasis& basis) {
  const int n = basis.size();
  std::vector<Eigen::Triplet<cplx>> t, ti;
  t.reserve(2 * std::size_t(n));
  ti.reserve(2 * std::size_t(n));
  HermitianCoordinates hc;
  int m = 0;
  for (int k = 0; k < n; ++k) {
    const int r = basis.row(k), c = basis.col(k);
    if (r == c) {
      t.emplace_back(k, m, 1.0);
      ti.emplace_back(m, k, 1.0);
      hc.diagonal.push_back(m++);
    } else if (r < c) {
      const int kt = basis.index(c, r);
      t.emplace_back(k, m, 1.0);
      t.emplace_back(kt, m, 1.0);
      ti.emplace_back(m, k, 0.5);
      ti.emplace_back(m, kt, 0.5);
      ++m;
      t.emplace_back(k, m, kI);
      t.emplace_back(kt, m, -kI);
      ti.emplace_back(m, k, -0.5 * kI);
      ti.emplace_back(m, kt, 0.5 * kI);
      ++m;
    }
  }
  hc.to_pairs.resize(n, n);
  hc.to_pairs.setFromTriplets(t.begin(), t.end());
  hc.from_pairs.resize(n, n);
  hc.from_pairs.setFromTriplets(ti.begin(), ti.end());
  return hc;
}

// Replaces row `replaced_row` by the trace functional over `diagonal`.
template <class Mat>
Mat bordered_system(const Mat& l, const std::vector<int>& diagonal, int replaced_row) {
  using Scalar = typename Mat::Scalar;
  std::vector<char> is_diag(static_cast<std::size_t>(l.cols()), 0);
  for (int k : diagonal) {
    if (k >= 0) is_diag[k] = 1;
  }
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<std::size_t>(l.nonZeros()) + diagonal.size());
  for (int c = 0; c < l.outerSize(); ++c) {
    for (typename Mat::InnerIterator it(l, c); it; ++it) {
      if (it.row() != replaced_row) trips.emplace_back(int(it.row()), c, it.value());
    }
    if (is_diag[c]) trips.emplace_back(replaced_row, c, Scalar(1));
  }
  Mat m(l.rows(), l.cols());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// Smallest singular value of the factored matrix by inverse iteration on
// (M^dag M)^{-1}; a (near-)null vector means a steady-state manifold.
template <class Lu, class Vec>
double smallest_singular_value(Lu& lu, Vec v) {
  v.normalize();
  double growth = 0.0;
  for (int it = 0; it < 8; ++it) {
    const Vec w = lu.solve(v);
    const Vec z = lu.adjoint().solve(w);
    growth = z.norm();
    if (!std::isfinite(growth) || growth == 0.0) break;
    v = z / growth;
  }
  return (std::isfinite(growth) && growth > 0.0) ? 1.0 / std::sqrt(growth) : 0.0;
}

[[noreturn]] void throw_degenerate(double sigma_min) {
  throw SolverError("steady state is not unique (smallest singular value " + std::to_string(sigma_min) +
                    " of the bordered system)");
}

std::optional<CVec> solve_real(const SparseMat& l, const LiouvilleBasis& basis, const SolveOptions& options) {
  const HermitianCoordinates hc = hermitian_coordinates(basis);
  const SparseMat lc = hc.from_pairs * (l * hc.to_pairs);
  RealSparse lr = lc.real();
  const RealSparse li = lc.imag();
  const double scale = lr.nonZeros() > 0 ? lr.coeffs().cwiseAbs().maxCoeff() : 1.0;
  if (li.nonZeros() > 0 && li.coeffs().cwiseAbs().maxCoeff() > 1e-12 * scale) return std::nullopt;

  const int r0 = hc.diagonal.front();
  const RealSparse m = bordered_system(lr, hc.diagonal, r0);
  Eigen::SparseLU<RealSparse, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) {
    throw SolverError("steady-state system is singular: the steady state is not unique (" + lu.lastErrorMessage() +
                      ")");
  }
  RealVec rhs = RealVec::Zero(m.rows());
  rhs[r0] = 1.0;
  const RealVec y = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !y.allFinite()) throw SolverError("steady-state solve failed");

  RealVec v(m.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.37 * std::sin(1.3 * double(i));
  const double sigma_min = smallest_singular_value(lu, v);
  if (sigma_min < options.degeneracy_tol * m.norm()) throw_degenerate(sigma_min);
  return CVec(hc.to_pairs * y.cast<cplx>());
}

CVec solve_complex(const SparseMat& l, const LiouvilleBasis& basis, const SolveOptions& options) {
  const int r0 = basis.diagonal().front();
  const SparseMat m = bordered_system(l, basis.diagonal(), r0);
  Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) {
    throw SolverError("steady-state system is singular: the steady state is not unique (" + lu.lastErrorMessage() +
                      ")");
  }
  CVec rhs = CVec::Zero(m.rows());
  rhs[r0] = 1.0;
  const CVec x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("steady-state solve failed");

  CVec v(m.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = cplx(1.0 + 0.37 * std::sin(1.3 * double(i)), 0.21 * std::cos(0.7 * double(i)));
  }
  const double sigma_min = smallest_singular_value(lu, v);
  if (sigma_min < options.degeneracy_tol * m.norm()) throw_degenerate(sigma_min);
  return x;
}

}  // namespace

SteadySolution solve_steady(const Superoperator& generator, const SolveOptions& options) {
  const LiouvilleBasis& basis = generator.basis();
  if (basis.diagonal().empty() || basis.diagonal().front() < 0) {
    throw InvalidArgument("basis does not retain the diagonal pairs");
  }
  // Hermiticity-preserving generators are solved in real coordinates.
  std::optional<CVec> x = solve_real(generator.matrix(), basis, options);
  if (!x) x = solve_complex(generator.matrix(), basis, options);

  DensityMatrix rho(basis.layout(), basis.unvectorize(*x));
  rho.hermitize_and_normalize();
  const double lnorm = generator.norm();
  const double residual = lnorm > 0.0 ? (generator.matrix() * basis.vectorize(rho.matrix())).norm() / lnorm : 0.0;
  if (residual > options.residual_tol) {
    throw SolverError("steady-state residual " + std::to_string(residual) + " exceeds tolerance");
  }
  const double lmin = rho.min_eigenvalue();
  if (lmin < -options.negativity_tol) {
    throw SolverError("steady state has negative eigenvalue " + std::to_string(lmin));
  }
  const SpaceLayout& l = basis.layout();
  return SteadySolution{.rho = std::move(rho),
                        .residual = residual,
                        .min_eigenvalue = lmin,
                        .n_max1 = l.n_max1(),
                        .n_max2 = l.n_max2()};
}

SteadySolution solve_steady(const LiouvillianBundle& bundle, const SolveOptions& options) {
  return solve_steady(bundle.generator, options);
}

double spectral_norm_estimate(const Superoperator& generator, int iterations) {
  const SparseMat& l = generator.matrix();
  const int n = static_cast<int>(l.cols());
  if (n == 0) return 0.0;
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.5 * std::sin(0.9 * i), 0.3 * std::cos(1.7 * i));
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const CVec w = l * v;
    const CVec z = l.adjoint() * w;
    const double nz = z.norm();
    if (nz == 0.0) return 0.0;
    sigma = std::sqrt(nz);
    v = z / nz;
  }
  // Power iteration approaches from below; pad so the bound is conservative.
  return 1.05 * sigma;
}

DensityMatrix time_evolve(const Superoperator& generator, const DensityMatrix& rho0, double t_final, double dt) {
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw InvalidArgument("time_evolve needs dt > 0 and t_final >= 0");
  const double lnorm = spectral_norm_estimate(generator);
  if (dt * lnorm >= 0.1) {
    throw InvalidArgument("time step too large: dt * ||L|| = " + std::to_string(dt * lnorm) + " (needs < 0.1)");
  }
  const LiouvilleBasis& basis = generator.basis();
  if (!(rho0.layout() == basis.layout())) throw InvalidArgument("initial state layout does not match generator");
  CVec v = basis.vectorize(rho0.matrix());
  if ((basis.unvectorize(v) - rho0.matrix()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("initial state has weight outside the generator's symmetry sector");
  }
  const cplx tr0 = rho0.trace();
  const SparseMat& l = generator.matrix();
  const long steps = static_cast<long>(std::ceil(t_final / dt));
  const double h = steps > 0 ? t_final / steps : 0.0;
  for (long s = 0; s < steps; ++s) {
    const CVec k1 = l * v;
    const CVec k2 = l * (v + 0.5 * h * k1);
    const CVec k3 = l * (v + 0.5 * h * k2);
    const CVec k4 = l * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  DensityMatrix out(basis.layout(), basis.unvectorize(v));
  if (std::abs(out.trace() - tr0) > 1e-8) {
    throw SolverError("trace drift " + std::to_string(std::abs(out.trace() - tr0)) + " during time evolution");
  }
  return out;
}

DensityMatrix time_evolve(const LiouvillianBundle& bundle, const DensityMatrix& rho0, double t_final, double dt) {
  return time_evolve(bundle.generator, rho0, t_final, dt);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (!(a.layout() == b.layout())) throw InvalidArgument("trace distance needs equal layouts");
  const DenseMat d = a.matrix() - b.matrix();
  const DenseMat h = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMat> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

SteadySolution truncation_convergence(const SystemParams& p, const PhononKernels& kernels,
                                      const std::vector<std::string>& observables, ModelForm form,
                                      const ConvergenceOptions& options) {
  if (options.step < 1) throw InvalidArgument("truncation step must be >= 1");
  if (observables.empty()) throw InvalidArgument("truncation convergence needs at least one observable");
  std::string joined;
  for (const auto& o : observables) joined += (joined.empty() ? "" : ",") + o;

  using Values = std::vector<std::optional<double>>;
  auto solve_at = [&](const SystemParams& params) {
    const LiouvillianBundle b = build_liouvillian(params, form, kernels, options.build);
    SteadySolution s = solve_steady(b, options.solve);
    const ObservableSet obs = compute_observables(s.rho);
    Values v;
    for (const auto& o : observables) v.push_back(observable_value(obs, o));
    return std::pair{std::move(s), std::move(v)};
  };
  auto relative_change = [](const Values& a, const Values& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i] && !b[i]) continue;
      if (!a[i] || !b[i]) return std::numeric_limits<double>::infinity();
      const double diff = std::abs(*b[i] - *a[i]);
      if (diff <= 1e-12) continue;
      worst = std::max(worst, diff / std::max(std::abs(*b[i]), 1e-300));
    }
    return worst;
  };

  SystemParams q = p;
  Values values = solve_at(q).second;
  double change = std::numeric_limits<double>::infinity();
  while (true) {
    const int n1 = q.layout.n_max1() + options.step;
    const int n2 = q.layout.n_max2() + options.step;
    if (n1 > options.max_n || n2 > options.max_n) {
      if (q.layout == p.layout) {
        throw SolverError("truncation not converged for " + joined + ": no escalation step fits within max_n = " +
                          std::to_string(options.max_n));
      }
      throw SolverError("truncation not converged for " + joined + " by n_max = " + std::to_string(options.max_n) +
                        " (last relative change " + std::to_string(change) + ")");
    }
    q.layout = SpaceLayout(n1, n2);
    auto [next, next_values] = solve_at(q);
    change = relative_change(values, next_values);
    if (change < options.rel_tol) {
      next.converged = true;
      next.convergence_observable = joined;
      next.convergence_change = change;
      return next;
    }
    values = std::move(next_values);
  }
}

SteadySolution truncation_convergence(const SystemParams& p, const PhononKernels& kernels,
                                      const std::string& observable, ModelForm form,
                                      const ConvergenceOptions& options) {
  return truncation_convergence(p, kernels, std::vector<std::string>{observable}, form, options);
}

}  // namespace qdl
