#include "qdl/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace qdl {

double PhotonDistribution::mean(int mode) const {
  double s = 0.0;
  for (Eigen::Index n = 0; n < p.rows(); ++n) {
    for (Eigen::Index m = 0; m < p.cols(); ++m) s += (mode == 1 ? n : m) * p(n, m);
  }
  return s;
}

double PhotonDistribution::second_moment(int mode) const {
  double s = 0.0;
  for (Eigen::Index n = 0; n < p.rows(); ++n) {
    for (Eigen::Index m = 0; m < p.cols(); ++m) {
      const double k = double(mode == 1 ? n : m);
      s += k * k * p(n, m);
    }
  }
  return s;
}

double PhotonDistribution::factorial_moment(int mode) const { return second_moment(mode) - mean(mode); }

double PhotonDistribution::cross_moment() const {
  double s = 0.0;
  for (Eigen::Index n = 0; n < p.rows(); ++n) {
    for (Eigen::Index m = 0; m < p.cols(); ++m) s += double(n) * double(m) * p(n, m);
  }
  return s;
}

PhotonDistribution photon_number_distribution(const DensityMatrix& rho) {
  const SpaceLayout& l = rho.layout();
  PhotonDistribution d{Eigen::MatrixXd::Zero(l.n_max1() + 1, l.n_max2() + 1)};
  for (int i = 0; i < l.dim(); ++i) {
    const BasisState s = l.state(i);
    d.p(s.n1, s.n2) += rho.matrix()(i, i).real();
  }
  return d;
}

ObservableSet compute_observables(const DensityMatrix& rho) {
  const SpaceLayout& l = rho.layout();
  ObservableSet o;
  auto pop = [&](Level lv) { return expectation(qd_projector(lv, lv, l), rho).real(); };
  o.pop_g = pop(Level::g);
  o.pop_x = pop(Level::x);
  o.pop_y = pop(Level::y);
  o.pop_u = pop(Level::u);

  const auto a1 = annihilator(1, l), a2 = annihilator(2, l);
  const auto a1d = a1.adjoint(), a2d = a2.adjoint();
  const auto n1 = a1d * a1, n2 = a2d * a2;
  o.n1 = expectation(n1, rho).real();
  o.n2 = expectation(n2, rho).real();
  const double n1sq = expectation(n1 * n1, rho).real();
  const double n2sq = expectation(n2 * n2, rho).real();
  const double f1 = expectation(a1d * a1d * a1 * a1, rho).real();
  const double f2 = expectation(a2d * a2d * a2 * a2, rho).real();
  const double c12 = expectation(n1 * n2, rho).real();

  if (o.n1 >= kVacuumThreshold) {
    o.F1 = (n1sq - o.n1 * o.n1) / o.n1;
    o.g2_1 = f1 / (o.n1 * o.n1);
  }
  if (o.n2 >= kVacuumThreshold) {
    o.F2 = (n2sq - o.n2 * o.n2) / o.n2;
    o.g2_2 = f2 / (o.n2 * o.n2);
  }
  if (o.n1 >= kVacuumThreshold && o.n2 >= kVacuumThreshold) o.g2_12 = c12 / (o.n1 * o.n2);
  o.P_nm = photon_number_distribution(rho);
  return o;
}

const std::vector<std::string>& observable_labels() {
  static const std::vector<std::string> labels = {"pop_g", "pop_x", "pop_y", "pop_u", "n1",   "n2",
                                                  "F1",    "F2",    "g2_1",  "g2_2",  "g2_12"};
  return labels;
}

std::optional<double> observable_value(const ObservableSet& o, const std::string& label) {
  if (label == "pop_g") return o.pop_g;
  if (label == "pop_x") return o.pop_x;
  if (label == "pop_y") return o.pop_y;
  if (label == "pop_u") return o.pop_u;
  if (label == "n1") return o.n1;
  if (label == "n2") return o.n2;
  if (label == "F1") return o.F1;
  if (label == "F2") return o.F2;
  if (label == "g2_1") return o.g2_1;
  if (label == "g2_2") return o.g2_2;
  if (label == "g2_12") return o.g2_12;
  throw InvalidArgument("unknown observable label '" + label + "'");
}

// ---------------------------------------------------------------------------

EmissionRates emission_rate_decomposition(const LiouvillianBundle& bundle, const DensityMatrix& rho,
                                          double balance_tol) {
  if (bundle.form != ModelForm::effective) {
    throw InvalidArgument("emission-rate decomposition needs an effective-form bundle");
  }
  const SpaceLayout& l = rho.layout();
  if (!(l == bundle.params.layout)) throw InvalidArgument("density matrix layout does not match the bundle");
  const auto n1 = number_operator(1, l), n2 = number_operator(2, l);

  static const std::set<std::string> single1 = {"coupling_1", "Gamma_plus_1", "Gamma_minus_1"};
  static const std::set<std::string> single2 = {"coupling_2", "Gamma_plus_2", "Gamma_minus_2"};
  static const std::set<std::string> pair = {"omega_12", "Gamma_ug", "Gamma_gu"};

  EmissionRates out;
  double sum1 = 0.0, sum2 = 0.0;
  for (const auto& t : bundle.terms) {
    const DensityMatrix d(l, apply_terms(t.terms, rho.matrix()));
    FluxEntry e{t.label, expectation(n1, d).real(), expectation(n2, d).real()};
    if (t.label != "kappa_1") sum1 += e.mode1;
    if (t.label != "kappa_2") sum2 += e.mode2;
    if (single1.count(t.label)) out.single1_net += e.mode1;
    if (single2.count(t.label)) out.single2_net += e.mode2;
    if (pair.count(t.label)) out.twophoton_net += e.mode1;
    out.ledger.push_back(std::move(e));
  }
  const double k1 = bundle.params.kappa_1 * expectation(n1, rho).real();
  const double k2 = bundle.params.kappa_2 * expectation(n2, rho).real();
  out.balance_residual = std::max(std::abs(sum1 - k1), std::abs(sum2 - k2));
  if (out.balance_residual > balance_tol) {
    throw SolverError("photon-number balance violated by " + std::to_string(out.balance_residual) +
                      "; input is not a steady state of the bundle");
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct WitnessMoments {
  double n1, n2;
  cplx a1, a2, a1a2;
};

WitnessMoments witness_moments(const DensityMatrix& rho) {
  const SpaceLayout& l = rho.layout();
  const auto a1 = annihilator(1, l), a2 = annihilator(2, l);
  return {expectation(a1.adjoint() * a1, rho).real(), expectation(a2.adjoint() * a2, rho).real(),
          expectation(a1, rho), expectation(a2, rho), expectation(a1 * a2, rho)};
}

double witness_value(const WitnessMoments& m, double phase_sum) {
  // <a1^dag a2^dag> = conj <a1 a2>, <a^dag> = conj <a>
  const cplx e = std::exp(kI * phase_sum);
  const cplx v = 1.0 + m.n1 + m.n2 + std::conj(m.a1a2) * std::conj(e) + m.a1a2 * e - std::norm(m.a1) -
                 std::norm(m.a2) - std::conj(m.a1) * std::conj(m.a2) * std::conj(e) - m.a1 * m.a2 * e;
  return 2.0 * v.real();
}

}  // namespace

EntanglementWitness dgcz_variance(const DensityMatrix& rho, double phi1, double phi2) {
  const double v = witness_value(witness_moments(rho), phi1 + phi2);
  return {phi1, phi2, v, v < 2.0};
}

EntanglementWitness dgcz_phase_scan(const DensityMatrix& rho, int points) {
  if (points < 1) throw InvalidArgument("phase scan needs at least one point");
  const WitnessMoments m = witness_moments(rho);
  EntanglementWitness best{0.0, 0.0, witness_value(m, 0.0), false};
  for (int k = 1; k < points; ++k) {
    const double s = 2.0 * std::numbers::pi * k / points;
    const double v = witness_value(m, s);
    if (v < best.variance_sum) best = {s, 0.0, v, false};
  }
  best.entangled = best.variance_sum < 2.0;
  return best;
}

}  // namespace qdl
