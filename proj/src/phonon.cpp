#include "qdl/phonon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <gsl/gsl_sf_dawson.h>

namespace qdl {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrtHalfPi = 1.2533141373155002512;  // sqrt(pi/2)

using GaussRule = boost::math::quadrature::gauss<double, 20>;

// Bose occupation times omega, finite at omega -> 0.
double omega_bose(double omega, double kt) {
  const double x = omega / kt;
  if (x < 1e-8) return kt;
  if (x > 700.0) return 0.0;
  return omega / std::expm1(x);
}

double thermal_cutoff(const PhononBathParams& p, double kt) {
  return std::min(p.omega_cutoff(), 60.0 * kt);
}

// q(x) = 1 - 2x F(x) with F the Dawson function, and q'(x). The direct form
// cancels catastrophically for large x; there the asymptotic series is used:
//   q = -sum_k (2k-1)!! / (2x^2)^k,   q' = sum_k 2k (2k-1)!! / (2^k x^{2k+1})
void dawson_q(double x, double& q, double& dq) {
  if (x < 12.0) {
    const double f = gsl_sf_dawson(x);
    q = 1.0 - 2.0 * x * f;
    dq = -2.0 * f - 2.0 * x * q;
    return;
  }
  const double inv2x2 = 0.5 / (x * x);
  double term = 1.0;  // (2k-1)!! / (2x^2)^k
  q = 0.0;
  dq = 0.0;
  for (int k = 1; k <= 12; ++k) {
    term *= (2 * k - 1) * inv2x2;
    q -= term;
    dq += 2.0 * k * term / x;
  }
}

// Closed-form zero-temperature part (coth -> 1), with x = s tau / sqrt2:
//   Re phi0 = a s^2 q(x),  Im phi0 = -a sqrt(pi/2) s^3 tau e^{-s^2 tau^2/2}
// Also returns d phi0 / d tau.
void phi_zero_temperature(double tau, const PhononBathParams& p, cplx& phi, cplx& dphi) {
  const double a = p.alpha_p;
  const double s = p.omega_b;
  double q = 0.0, dq = 0.0;
  dawson_q(s * tau / kSqrt2, q, dq);
  const double gauss = std::exp(-0.5 * s * s * tau * tau);
  phi = {a * s * s * q, -a * kSqrtHalfPi * s * s * s * tau * gauss};
  dphi = {a * s * s * dq * s / kSqrt2, -a * kSqrtHalfPi * s * s * s * (1.0 - s * s * tau * tau) * gauss};
}

// Thermal correction  ∫ 2 J(w)/w^2 n(w) cos(w tau) dw  and its tau-derivative
// by composite Gauss-Legendre, panels sized to the oscillation.
void phi_thermal_fixed(double tau, const PhononBathParams& p, double kt, double& val, double& dval) {
  val = 0.0;
  dval = 0.0;
  if (kt <= 0.0 || p.alpha_p == 0.0) return;
  const double wc = thermal_cutoff(p, kt);
  const int panels = std::max(16, static_cast<int>(std::ceil(wc * tau / std::numbers::pi)) + 8);
  const double width = wc / panels;
  const auto& xs = GaussRule::abscissa();
  const auto& ws = GaussRule::weights();
  const double inv2s2 = 0.5 / (p.omega_b * p.omega_b);
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * width;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      for (int sign : {-1, 1}) {
        if (xs[q] == 0.0 && sign < 0) continue;
        const double w = mid + sign * 0.5 * width * xs[q];
        const double weight = 0.5 * width * ws[q];
        const double f = 2.0 * p.alpha_p * omega_bose(w, kt) * std::exp(-w * w * inv2s2);
        const double c = std::cos(w * tau);
        const double sn = std::sin(w * tau);
        val += weight * f * c;
        dval -= weight * f * w * sn;
      }
    }
  }
}

// m_k(theta) = ∫_0^1 t^k e^{i theta t} dt, k = 0..3.
std::array<cplx, 4> unit_moments(double theta) {
  std::array<cplx, 4> m{};
  if (std::abs(theta) < 1.0) {
    // sum_n (i theta)^n / (n! (n + k + 1))
    cplx term = 1.0;
    for (int n = 0; n < 24; ++n) {
      for (int k = 0; k < 4; ++k) m[k] += term / double(n + k + 1);
      term *= kI * theta / double(n + 1);
    }
    return m;
  }
  const cplx e(std::cos(theta), std::sin(theta));
  const cplx z = kI * theta;
  m[0] = (e - 1.0) / z;
  for (int k = 1; k < 4; ++k) m[k] = (e - double(k) * m[k - 1]) / z;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

void PhononBathParams::validate() const {
  if (!(alpha_p >= 0.0) || !std::isfinite(alpha_p)) throw InvalidArgument("alpha_p must be finite and >= 0");
  if (!(omega_b > 0.0) || !std::isfinite(omega_b)) throw InvalidArgument("omega_b must be finite and > 0");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("temperature must be finite and >= 0");
  }
  if (!std::isfinite(g1_absolute)) throw InvalidArgument("g1_absolute must be finite");
}

double PhononBathParams::thermal_energy() const {
  if (temperature == 0.0) return 0.0;
  if (!calibrated()) throw InvalidArgument("bath needs a calibrated g1_absolute at T > 0");
  return temperature / (kHbarOverKb * g1_absolute);
}

double spectral_density(double omega, const PhononBathParams& params) {
  if (omega < 0.0) throw InvalidArgument("spectral density needs omega >= 0");
  return params.alpha_p * omega * omega * omega *
         std::exp(-omega * omega / (2.0 * params.omega_b * params.omega_b));
}

double displacement_average(const PhononBathParams& params) {
  params.validate();
  const double s = params.omega_b;
  const double wc = params.omega_cutoff();
  double integral = params.alpha_p * s * s * -std::expm1(-0.5 * wc * wc / (s * s));
  const double kt = params.thermal_energy();
  if (kt > 0.0 && params.alpha_p > 0.0) {
    auto f = [&](double w) { return 2.0 * params.alpha_p * omega_bose(w, kt) * std::exp(-w * w / (2.0 * s * s)); };
    double err = 0.0;
    const double th = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, thermal_cutoff(params, kt), 15, 1e-13, &err);
    if (err > 1e-8 * std::abs(th) && err > 1e-15) {
      throw QuadratureError("<B> thermal integral did not converge (error " + std::to_string(err) + ")");
    }
    integral += th;
  }
  return std::exp(-0.5 * integral);
}

cplx correlation_phi(double tau, const PhononBathParams& params) {
  if (tau < 0.0) throw InvalidArgument("correlation_phi needs tau >= 0");
  params.validate();
  cplx phi, dphi;
  phi_zero_temperature(tau, params, phi, dphi);
  const double kt = params.thermal_energy();
  if (kt > 0.0 && params.alpha_p > 0.0) {
    const double s = params.omega_b;
    auto f = [&](double w) {
      return 2.0 * params.alpha_p * omega_bose(w, kt) * std::exp(-w * w / (2.0 * s * s)) * std::cos(w * tau);
    };
    const double wc = thermal_cutoff(params, kt);
    const int pieces = std::max(1, static_cast<int>(std::ceil(wc * tau / (2.0 * std::numbers::pi))));
    double sum = 0.0, err = 0.0, scale = 0.0;
    for (int k = 0; k < pieces; ++k) {
      double e = 0.0, l1 = 0.0;
      sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, wc * k / pieces, wc * (k + 1) / pieces, 12, 1e-13, &e, &l1);
      err += e;
      scale += l1;
    }
    if (err > 1e-8 * scale && err > 1e-15) {
      throw QuadratureError("phi(tau) thermal integral did not converge at tau = " + std::to_string(tau));
    }
    phi += sum;
  }
  return phi;
}

PhononBathParams calibrate_absolute_scale(PhononBathParams params, double target_b, double temperature_ref) {
  if (!(target_b > 0.0 && target_b < 1.0)) throw InvalidArgument("target <B> must lie in (0, 1)");
  if (!(temperature_ref > 0.0)) throw InvalidArgument("calibration temperature must be > 0");
  PhononBathParams probe = params;
  probe.temperature = temperature_ref;
  auto residual = [&](double g1) {
    probe.g1_absolute = g1;
    return displacement_average(probe) - target_b;
  };
  double lo = 0.01, hi = 10.0;
  const double f_lo = residual(lo);
  const double f_hi = residual(hi);
  if (f_lo * f_hi > 0.0) {
    throw InvalidArgument("no g1_absolute in [0.01, 10] 1/ps reproduces the target <B>");
  }
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::abs(a); };
  const auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, f_lo, f_hi, tol, iters);
  params.g1_absolute = 0.5 * (a + b);
  return params;
}

PhononBathParams default_bath(double temperature) {
  static std::once_flag once;
  static double g1 = 0.0;
  std::call_once(once, [] { g1 = calibrate_absolute_scale(PhononBathParams{}).g1_absolute; });
  PhononBathParams p;
  p.temperature = temperature;
  p.g1_absolute = g1;
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

PhononKernels::PhononKernels(const PhononBathParams& params, const KernelGridOptions& options)
    : params_(params) {
  params_.validate();
  if (options.fine_panels < 16 || !(options.growth > 1.0) || !(options.tau_cap > 0.0)) {
    throw InvalidArgument("invalid kernel grid options");
  }
  const double kt = params_.thermal_energy();
  fine_panels_ = options.fine_panels;
  fine_step_ = options.fine_extent_cutoffs / params_.omega_b / fine_panels_;

  auto eval = [&](double tau, cplx& phi, cplx& dphi) {
    phi_zero_temperature(tau, params_, phi, dphi);
    double th = 0.0, dth = 0.0;
    phi_thermal_fixed(tau, params_, kt, th, dth);
    phi += th;
    dphi += dth;
  };

  const int nf = fine_panels_ + 1;
  tau_.resize(nf);
  phi_.resize(nf);
  dphi_.resize(nf);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nf; ++i) {
    tau_[i] = i * fine_step_;
    eval(tau_[i], phi_[i], dphi_[i]);
  }

  const double phi0 = std::abs(phi_[0]);
  auto decayed = [&](double tau, const cplx& phi, const cplx& dphi) {
    const double tol = options.decay_tolerance * std::max(phi0, 1e-300);
    return std::abs(phi) < tol && tau * std::abs(dphi) < tol;
  };

  double h = fine_step_;
  while (!decayed(tau_.back(), phi_.back(), dphi_.back()) && tau_.back() < options.tau_cap) {
    h *= options.growth;
    const double tau = tau_.back() + h;
    cplx phi, dphi;
    eval(tau, phi, dphi);
    tau_.push_back(tau);
    phi_.push_back(phi);
    dphi_.push_back(dphi);
  }

  b_avg_ = std::exp(-0.5 * phi_[0].real());
  const double b2 = b_avg_ * b_avg_;
  const std::size_t n = tau_.size();
  gg_.resize(n);
  dgg_.resize(n);
  gu_.resize(n);
  dgu_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx sh = std::sinh(phi_[i]);
    const cplx half = std::sinh(0.5 * phi_[i]);
    gg_[i] = b2 * 2.0 * half * half;
    dgg_[i] = b2 * sh * dphi_[i];
    gu_[i] = b2 * sh;
    dgu_[i] = b2 * std::cosh(phi_[i]) * dphi_[i];
  }

  const double g_tail = std::max(std::abs(gg_.back()), std::abs(gu_.back()));
  if (g_tail > 1e-8) {
    throw QuadratureError("tau grid too short: |G(tau_max)| = " + std::to_string(g_tail));
  }
}

cplx PhononKernels::phi(double tau) const {
  if (tau < 0.0) throw InvalidArgument("phi needs tau >= 0");
  if (tau >= tau_.back()) return 0.0;
  const auto it = std::upper_bound(tau_.begin(), tau_.end(), tau);
  const std::size_t i = static_cast<std::size_t>(it - tau_.begin()) - 1;
  const double h = tau_[i + 1] - tau_[i];
  const double t = (tau - tau_[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * phi_[i] + h10 * h * dphi_[i] + h01 * phi_[i + 1] + h11 * h * dphi_[i + 1];
}

cplx PhononKernels::green(Kernel kernel, double tau) const {
  const cplx p = phi(tau);
  const double b2 = b_avg_ * b_avg_;
  if (kernel == Kernel::g) {
    const cplx half = std::sinh(0.5 * p);
    return b2 * 2.0 * half * half;
  }
  return b2 * std::sinh(p);
}

void PhononKernels::half_fourier_one(double omega, cplx& k_g, cplx& k_u) const {
  // Exact integral of the cubic Hermite interpolant on each panel:
  //   ∫_{tau_i}^{tau_i+h} p(tau) e^{i w tau} = h e^{i w tau_i} sum_k a_k m_k(w h)
  auto coeffs = [](const cplx& g0, const cplx& d0, const cplx& g1, const cplx& d1, double h) {
    return std::array<cplx, 4>{g0, h * d0, 3.0 * (g1 - g0) - h * (2.0 * d0 + d1),
                               2.0 * (g0 - g1) + h * (d0 + d1)};
  };
  cplx sum_g = 0.0, sum_u = 0.0;

  const double h = fine_step_;
  const auto mf = unit_moments(omega * h);
  const cplx step(std::cos(omega * h), std::sin(omega * h));
  cplx phase = 1.0;
  for (int i = 0; i < fine_panels_; ++i) {
    if (i % 64 == 0) phase = cplx(std::cos(omega * tau_[i]), std::sin(omega * tau_[i]));
    const auto ag = coeffs(gg_[i], dgg_[i], gg_[i + 1], dgg_[i + 1], h);
    const auto au = coeffs(gu_[i], dgu_[i], gu_[i + 1], dgu_[i + 1], h);
    sum_g += phase * (ag[0] * mf[0] + ag[1] * mf[1] + ag[2] * mf[2] + ag[3] * mf[3]);
    sum_u += phase * (au[0] * mf[0] + au[1] * mf[1] + au[2] * mf[2] + au[3] * mf[3]);
    phase *= step;
  }
  sum_g *= h;
  sum_u *= h;

  for (std::size_t i = static_cast<std::size_t>(fine_panels_); i + 1 < tau_.size(); ++i) {
    const double hp = tau_[i + 1] - tau_[i];
    const auto m = unit_moments(omega * hp);
    const cplx ph = hp * cplx(std::cos(omega * tau_[i]), std::sin(omega * tau_[i]));
    const auto ag = coeffs(gg_[i], dgg_[i], gg_[i + 1], dgg_[i + 1], hp);
    const auto au = coeffs(gu_[i], dgu_[i], gu_[i + 1], dgu_[i + 1], hp);
    sum_g += ph * (ag[0] * m[0] + ag[1] * m[1] + ag[2] * m[2] + ag[3] * m[3]);
    sum_u += ph * (au[0] * m[0] + au[1] * m[1] + au[2] * m[2] + au[3] * m[3]);
  }
  k_g = sum_g;
  k_u = sum_u;
}

cplx PhononKernels::half_fourier(Kernel kernel, double omega) const {
  cplx kg, ku;
  half_fourier_one(omega, kg, ku);
  return kernel == Kernel::g ? kg : ku;
}

void PhononKernels::half_fourier(std::span<const double> omegas, std::span<cplx> k_g, std::span<cplx> k_u,
                                 Execution exec) const {
  if (k_g.size() != omegas.size() || k_u.size() != omegas.size()) {
    throw InvalidArgument("half_fourier output spans must match the frequency list");
  }
  const auto n = static_cast<std::ptrdiff_t>(omegas.size());
#pragma omp parallel for schedule(dynamic, 16) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) half_fourier_one(omegas[i], k_g[i], k_u[i]);
}

cplx PhononKernels::emission_integral(double omega) const {
  cplx kg, ku;
  half_fourier_one(omega, kg, ku);
  return (kg + ku) / (b_avg_ * b_avg_);
}

cplx PhononKernels::absorption_integral(double omega) const {
  cplx kg, ku;
  half_fourier_one(omega, kg, ku);
  return (kg - ku) / (b_avg_ * b_avg_);
}

// ---------------------------------------------------------------------------

EffectiveRates effective_rates_incoherent(double g1, double g2, double delta_1, double delta_2,
                                          const PhononKernels& kernels) {
  const double b2 = kernels.displacement_average() * kernels.displacement_average();
  const cplx e1p = kernels.emission_integral(delta_1);
  const cplx e1m = kernels.emission_integral(-delta_1);
  const cplx e2p = kernels.emission_integral(delta_2);
  const cplx e2m = kernels.emission_integral(-delta_2);

  EffectiveRates r;
  r.delta_plus_1 = g1 * g1 * b2 * e1p.imag();
  r.delta_minus_1 = g1 * g1 * b2 * e1m.imag();
  r.delta_plus_2 = g2 * g2 * b2 * e2p.imag();
  r.delta_minus_2 = g2 * g2 * b2 * e2m.imag();
  r.gamma_plus_1 = 2.0 * g1 * g1 * b2 * e1p.real();
  r.gamma_minus_1 = 2.0 * g1 * g1 * b2 * e1m.real();
  r.gamma_plus_2 = 2.0 * g2 * g2 * b2 * e2p.real();
  r.gamma_minus_2 = 2.0 * g2 * g2 * b2 * e2m.real();

  r.beta_1 = kernels.absorption_integral(-delta_1);
  r.beta_2 = kernels.absorption_integral(delta_2);
  const double c = g1 * g2 * b2;
  r.omega_12 = -0.5 * kI * c * (r.beta_1 - std::conj(r.beta_2));
  r.gamma_ug = c * (r.beta_1 + std::conj(r.beta_2));
  r.gamma_gu = c * (std::conj(r.beta_1) + r.beta_2);
  return r;
}

EffectiveRatesCoherent effective_rates_coherent(double omega_1, double omega_2, double delta_p,
                                                double delta_xx, double delta_x, const PhononKernels& kernels,
                                                OmegaPPrefactor prefactor, double cavity_frame_product) {
  const double b2 = kernels.displacement_average() * kernels.displacement_average();
  EffectiveRatesCoherent r;
  r.delta_p_prime = delta_p - delta_x - delta_xx;
  const double dp = delta_p;
  const double dq = r.delta_p_prime;
  const cplx e1p = kernels.emission_integral(dp);
  const cplx e1m = kernels.emission_integral(-dp);
  const cplx e2p = kernels.emission_integral(dq);
  const cplx e2m = kernels.emission_integral(-dq);

  r.delta_p_plus_1 = omega_1 * omega_1 * b2 * e1p.imag();
  r.delta_p_minus_1 = omega_1 * omega_1 * b2 * e1m.imag();
  r.delta_p_plus_2 = omega_2 * omega_2 * b2 * e2p.imag();
  r.delta_p_minus_2 = omega_2 * omega_2 * b2 * e2m.imag();
  r.gamma_p_plus_1 = 2.0 * omega_1 * omega_1 * b2 * e1p.real();
  r.gamma_p_minus_1 = 2.0 * omega_1 * omega_1 * b2 * e1m.real();
  r.gamma_p_plus_2 = 2.0 * omega_2 * omega_2 * b2 * e2p.real();
  r.gamma_p_minus_2 = 2.0 * omega_2 * omega_2 * b2 * e2m.real();

  r.alpha_1 = kernels.absorption_integral(-dp);
  r.alpha_2 = kernels.absorption_integral(dq);
  const double c = omega_1 * omega_2 * b2;
  const double cp = (prefactor == OmegaPPrefactor::rabi ? omega_1 * omega_2 : cavity_frame_product) * b2;
  r.omega_p = -0.5 * kI * cp * (r.alpha_1 - std::conj(r.alpha_2));
  r.gamma_p_ug = c * (r.alpha_1 + std::conj(r.alpha_2));
  r.gamma_p_gu = c * (std::conj(r.alpha_1) + r.alpha_2);
  return r;
}

}  // namespace qdl
