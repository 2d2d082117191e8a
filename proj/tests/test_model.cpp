#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qdl/model.hpp"
#include "qdl/observables.hpp"
#include "qdl/steady_state.hpp"
#include "test_util.hpp"

using namespace qdl;

namespace {

const GeneratorTerm& term(const LiouvillianBundle& b, const std::string& label) {
  auto it = std::find_if(b.terms.begin(), b.terms.end(), [&](const GeneratorTerm& t) { return t.label == label; });
  REQUIRE(it != b.terms.end());
  return *it;
}

}  // namespace

TEST_CASE("default parameter set") {
  const SystemParams p;
  CHECK(p.kappa_1 == 0.1);
  CHECK(p.kappa_2 == 0.1);
  CHECK(p.gamma_1 == 0.01);
  CHECK(p.gamma_2 == 0.01);
  CHECK(p.gamma_d == 0.01);
  CHECK(p.Delta_xx == 15.0);
  CHECK(p.delta_x == -1.0);
  CHECK(p.Delta_2 == -5.0);
  CHECK(p.incoherent().eta_1 == 0.5);
  CHECK(p.incoherent().eta_2 == 0.5);
  CHECK(p.bath.temperature == 5.0);
  SystemParams bad = p;
  bad.kappa_1 = -0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("incoherent Hamiltonian matrix elements") {
  SystemParams p = test::working_point(2);
  const SpaceLayout& l = p.layout;
  const double b = 0.9;
  const ComplexOperator h = hamiltonian_incoherent(p, b);
  CHECK(h.is_hermitian());
  CHECK(std::abs(h.at(l.index(Level::g, 1, 0), l.index(Level::y, 0, 0)) - b * p.g1) < 1e-14);
  CHECK(std::abs(h.at(l.index(Level::y, 0, 1), l.index(Level::u, 0, 0)) - b * p.g2) < 1e-14);
  // Two-photon resonance: |u,0,0> and |g,1,1> are degenerate.
  const int u00 = l.index(Level::u, 0, 0), g11 = l.index(Level::g, 1, 1);
  CHECK(std::abs(h.at(u00, u00) - h.at(g11, g11)) < 1e-14);

  p.g1 = p.g2 = 0.0;
  const ComplexOperator h0 = hamiltonian_incoherent(p, b);
  const DenseMat d = h0.dense();
  CHECK((d - DenseMat(d.diagonal().asDiagonal())).norm() == 0.0);
  CHECK(std::abs(h0.at(u00, u00) - (-16.0)) < 1e-14);
  CHECK(std::abs(h0.at(l.index(Level::x, 0, 0), l.index(Level::x, 0, 0)) - (-1.0)) < 1e-14);
  CHECK(std::abs(h0.at(l.index(Level::g, 0, 0), l.index(Level::g, 0, 0))) == 0.0);
  CHECK_THROWS_AS(hamiltonian_coherent(p, b), InvalidArgument);
}

TEST_CASE("coherent Hamiltonian and dressed states") {
  SystemParams p = test::coherent_point(2.0, 3.0, 1);
  const SpaceLayout& l = p.layout;
  const double b = 0.9;
  const int g00 = l.index(Level::g, 0, 0), x00 = l.index(Level::x, 0, 0);
  const ComplexOperator h = hamiltonian_coherent(p, b);
  CHECK(std::abs(h.at(x00, g00) - 2.0 * b) < 1e-14);

  SystemParams bare = p;
  bare.g1 = bare.g2 = 0.0;
  bare.pump = CoherentPump{0.0, 0.0, 3.0};
  CHECK(std::abs(hamiltonian_coherent(bare, b).at(x00, x00) - 3.0) < 1e-14);

  SystemParams dressed = bare;
  dressed.pump = CoherentPump{2.0, 0.0, 0.0};
  const DenseMat hd = hamiltonian_coherent(dressed, b).dense();
  DenseMat block(2, 2);
  block << hd(g00, g00), hd(g00, x00), hd(x00, g00), hd(x00, x00);
  const Eigensystem e = hermitian_eigendecomposition(block);
  CHECK(e.values(1) - e.values(0) == doctest::Approx(2.0 * 2.0 * b));
  CHECK(std::abs(std::abs(e.vectors(0, 0)) - std::sqrt(0.5)) < 1e-12);
  // Upper state (|x> + |g>)/sqrt 2, lower state (|x> - |g>)/sqrt 2.
  CHECK(std::abs(e.vectors(0, 1) / e.vectors(1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(e.vectors(0, 0) / e.vectors(1, 0) + 1.0) < 1e-12);
}

TEST_CASE("Lindblad channel enumeration") {
  CHECK(lindblad_channels(test::working_point(1)).size() == 11);
  CHECK(lindblad_channels(test::coherent_point(2.0, 0.0, 1)).size() == 9);
  for (const auto& c : lindblad_channels(test::working_point(1))) CHECK(c.rate >= 0.0);
}

TEST_CASE("pure dephasing keeps populations and damps coherences at half the rate") {
  SystemParams p = test::working_point(1);
  p.gamma_d = 0.1;
  const auto channels = lindblad_channels(p);
  const auto it = std::find_if(channels.begin(), channels.end(), [](const Channel& c) { return c.label == "gamma_d_x"; });
  REQUIRE(it != channels.end());
  const Superoperator d = dissipator(it->op, it->rate);
  DenseMat psi = DenseMat::Zero(p.layout.dim(), 1);
  const int g = p.layout.index(Level::g, 0, 0), x = p.layout.index(Level::x, 0, 0);
  psi(g) = psi(x) = std::sqrt(0.5);
  const DensityMatrix rho0(p.layout, psi * psi.adjoint());
  const double t = 10.0;
  const DensityMatrix rho = time_evolve(d, rho0, t, t / 1000.0);
  CHECK(std::abs(rho.matrix()(x, x) - 0.5) < 1e-12);
  CHECK(std::abs(rho.matrix()(g, g) - 0.5) < 1e-12);
  CHECK(std::abs(rho.matrix()(x, g) - 0.5 * std::exp(-0.5 * p.gamma_d * t)) < 1e-10);
}

TEST_CASE("polaron term vanishes without phonon coupling") {
  const SystemParams p = test::working_point(1);
  const ComplexOperator h = hamiltonian_incoherent(p, 1.0);
  const PhononCouplings x = phonon_couplings(p);
  PhononBathParams nb = p.bath;
  nb.alpha_p = 0.0;
  const PhononKernels none(nb);
  CHECK(polaron_dissipator(h, x.x_g, x.x_u, none).matrix().norm() == 0.0);
  const ComplexOperator zero = ComplexOperator::zero(p.layout);
  CHECK(polaron_dissipator(h, zero, zero, test::kernels_at(5.0)).matrix().norm() == 0.0);
}

TEST_CASE("spectral polaron term matches time-domain integration") {
  for (double temperature : {5.0, 20.0}) {
    SystemParams p = test::working_point(1, temperature);
    p.g2 = 0.0;
    p.pump = IncoherentPump{0.0, 0.0};
    const PhononKernels& k = test::kernels_at(temperature);
    const ComplexOperator h = hamiltonian_incoherent(p, k.displacement_average());
    const PhononCouplings x = phonon_couplings(p);
    const Superoperator spectral = polaron_dissipator(h, x.x_g, x.x_u, k, LiouvilleBasis::full(p.layout));
    const Superoperator direct = polaron_dissipator_time_domain(h, x.x_g, x.x_u, k, k.tau_max(), 100000);
    const double err = SparseMat(spectral.matrix() - direct.matrix()).norm();
    CHECK(err < 1e-6 * spectral.norm());
    CHECK(spectral.trace_defect() < 1e-12);
  }
}

TEST_CASE("full generator structure") {
  const SystemParams p = test::working_point(2);
  const LiouvillianBundle b = build_full_liouvillian(p, test::kernels_at(5.0));
  CHECK(b.generator.trace_defect() < 1e-10);
  const DenseMat mixed = DensityMatrix::maximally_mixed(p.layout).matrix();
  CHECK(std::abs(b.generator.apply(mixed).trace()) < 1e-12);
  CHECK(std::abs(b.b_avg - test::kernels_at(5.0).displacement_average()) < 1e-15);
  CHECK_THROWS_AS(build_full_liouvillian(p, test::kernels_at(20.0)), InvalidArgument);
}

TEST_CASE("dark system relaxes to the vacuum ground state") {
  SystemParams p = test::working_point(2);
  p.g1 = p.g2 = 0.0;
  p.pump = IncoherentPump{0.0, 0.0};
  const SteadySolution s = solve_steady(build_full_liouvillian(p, test::kernels_at(5.0)));
  const int g00 = p.layout.index(Level::g, 0, 0);
  CHECK(std::abs(s.rho.matrix()(g00, g00) - 1.0) < 1e-10);
}

TEST_CASE("population inversion at two-photon resonance") {
  const SystemParams p = test::working_point(6);
  const SteadySolution s = solve_steady(build_full_liouvillian(p, test::kernels_at(5.0)));
  const ObservableSet o = compute_observables(s.rho);
  CHECK(o.pop_u > o.pop_x);
  CHECK(o.pop_u > o.pop_y);
  CHECK(o.pop_u > o.pop_g);
}

TEST_CASE("effective and full forms agree at large detuning") {
  const SystemParams p = test::working_point(6);
  const PhononKernels& k = test::kernels_at(5.0);
  const ObservableSet full = compute_observables(solve_steady(build_liouvillian(p, ModelForm::full, k)).rho);
  const LiouvillianBundle eb = build_liouvillian(p, ModelForm::effective, k);
  CHECK(eb.warnings.empty());
  const ObservableSet eff = compute_observables(solve_steady(eb).rho);
  CHECK(std::abs(eff.n1 - full.n1) <= 0.15 * full.n1);
  CHECK(std::abs(eff.n2 - full.n2) <= 0.15 * full.n2);
  CHECK(std::abs(eff.pop_u - full.pop_u) <= 0.15 * full.pop_u);

  SystemParams near = p;
  near.Delta_1 = 2.0;
  CHECK_FALSE(build_liouvillian(near, ModelForm::effective, k).warnings.empty());
}

TEST_CASE("effective cross terms annihilate the trace") {
  const SystemParams p = test::working_point(2);
  const LiouvillianBundle b = build_liouvillian(p, ModelForm::effective, test::kernels_at(5.0));
  const DenseMat rho = test::random_density(p.layout.dim(), 11);
  for (const char* label : {"Gamma_ug", "Gamma_gu", "omega_12", "Gamma_plus_1", "Gamma_minus_2"}) {
    CHECK(std::abs(apply_terms(term(b, label).terms, rho).trace()) < 1e-12);
  }
  const LiouvillianBundle c = build_liouvillian(test::coherent_point(2.0, 0.0, 2), ModelForm::effective,
                                                test::kernels_at(5.0));
  CHECK(c.generator.trace_defect() < 1e-10);
  for (const char* label : {"Gamma_p_ug", "Gamma_p_gu", "omega_p"}) {
    CHECK(std::abs(apply_terms(term(c, label).terms, rho).trace()) < 1e-12);
  }
}

TEST_CASE("undriven coherent effective form reduces to the unpumped incoherent form") {
  const PhononKernels& k = test::kernels_at(5.0);
  SystemParams inc = test::working_point(2);
  inc.pump = IncoherentPump{0.0, 0.0};
  SystemParams coh = inc;
  coh.pump = CoherentPump{0.0, 0.0, inc.delta_x};
  BuildOptions full;
  full.full_space = true;
  const LiouvillianBundle a = build_liouvillian(inc, ModelForm::effective, k, full);
  const LiouvillianBundle c = build_liouvillian(coh, ModelForm::effective, k, full);
  CHECK(SparseMat(a.generator.matrix() - c.generator.matrix()).norm() < 1e-12 * a.generator.norm());
}
