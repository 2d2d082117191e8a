#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qdl/model.hpp"
#include "qdl/operators.hpp"
#include "test_util.hpp"

using namespace qdl;

TEST_CASE("layout dimension and index round trip") {
  const SpaceLayout l(3, 2);
  CHECK(l.dim() == 4 * 4 * 3);
  for (int i = 0; i < l.dim(); ++i) CHECK(l.index(l.state(i)) == i);
  CHECK(l.index(Level::g, 0, 1) == 1);
  CHECK(l.index(Level::x, 0, 0) == 12);
  CHECK_THROWS_AS(SpaceLayout(0, 2), InvalidArgument);
  CHECK_THROWS_AS(l.index(Level::g, 4, 0), InvalidArgument);
}

TEST_CASE("level labels") {
  CHECK(parse_level("u") == Level::u);
  CHECK(level_label(Level::y) == 'y');
  CHECK(excitation_count(Level::u) == 2);
  CHECK_THROWS_AS(parse_level("z"), InvalidArgument);
}

TEST_CASE("dot projectors") {
  const SpaceLayout l(2, 3);
  CHECK(std::abs(qd_projector("g", "g", l).dense().trace() - cplx(12.0)) < 1e-14);
  const ComplexOperator xx = qd_projector("x", "g", l) * qd_projector("g", "x", l);
  CHECK((xx.dense() - qd_projector("x", "x", l).dense()).norm() < 1e-14);
  CHECK((xx * xx).dense().isApprox(xx.dense()));
  CHECK((qd_projector("u", "y", l).adjoint().dense() - qd_projector("y", "u", l).dense()).norm() < 1e-14);
}

TEST_CASE("ladder operators") {
  const SpaceLayout l(5, 5);
  const ComplexOperator a1 = annihilator(1, l);
  CVec vac = CVec::Zero(l.dim());
  vac(l.index(Level::g, 0, 0)) = 1.0;
  CHECK((a1.matrix() * vac).norm() == 0.0);
  CHECK(std::abs(a1.at(l.index(Level::x, 1, 3), l.index(Level::x, 2, 3)) - std::sqrt(2.0)) < 1e-14);

  for (int mode : {1, 2}) {
    const DenseMat comm = (annihilator(mode, l) * creator(mode, l) - creator(mode, l) * annihilator(mode, l)).dense();
    for (int i = 0; i < l.dim(); ++i) {
      const BasisState s = l.state(i);
      const int n = mode == 1 ? s.n1 : s.n2;
      const double expected = n < 5 ? 1.0 : -5.0;
      CHECK(std::abs(comm(i, i) - expected) < 1e-12);
    }
    CHECK((comm - DenseMat(comm.diagonal().asDiagonal())).norm() < 1e-12);
  }
  CHECK((number_operator(2, l).dense() - (creator(2, l) * annihilator(2, l)).dense()).norm() < 1e-12);
}

TEST_CASE("embed matches the projector-ladder product") {
  const SpaceLayout l(2, 2);
  DenseMat dot = DenseMat::Zero(4, 4);
  dot(2, 0) = 1.0;  // |y><g|
  DenseMat a = DenseMat::Zero(3, 3);
  a(0, 1) = 1.0;
  a(1, 2) = std::sqrt(2.0);
  const ComplexOperator e = embed(dot, a, DenseMat::Identity(3, 3), l);
  CHECK((e.dense() - (qd_projector("y", "g", l) * annihilator(1, l)).dense()).norm() < 1e-14);
}

TEST_CASE("hermitian eigendecomposition") {
  DenseMat d = DenseMat::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = -1.0;
  d(2, 2) = 2.0;
  const Eigensystem e = hermitian_eigendecomposition(d);
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.values(2) == doctest::Approx(3.0));
  CHECK(std::abs(std::abs(e.vectors(1, 0)) - 1.0) < 1e-14);

  DenseMat s(2, 2);
  s << 0.0, 1.3, 1.3, 0.0;
  const Eigensystem e2 = hermitian_eigendecomposition(s);
  CHECK(e2.values(0) == doctest::Approx(-1.3));
  CHECK(e2.values(1) == doctest::Approx(1.3));

  const SystemParams p = test::working_point(4);
  const ComplexOperator h = hamiltonian_incoherent(p);
  const Eigensystem eh = hermitian_eigendecomposition(h);
  const DenseMat rec = eh.vectors * eh.values.cast<cplx>().asDiagonal() * eh.vectors.adjoint();
  CHECK((rec - h.dense()).norm() < 1e-9 * h.dense().norm());
  CHECK((eh.vectors.adjoint() * eh.vectors - DenseMat::Identity(h.dim(), h.dim())).norm() < 1e-10);

  DenseMat nh = s;
  nh(0, 1) = 2.0;
  CHECK_THROWS_AS(hermitian_eigendecomposition(nh), InvalidArgument);
}

TEST_CASE("expectation values") {
  const SpaceLayout l(30, 1);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(l);
  CHECK(std::abs(expectation(ComplexOperator::identity(l), mixed) - 1.0) < 1e-14);
  const DensityMatrix fock2 = DensityMatrix::basis_state(l, {Level::g, 2, 0});
  CHECK(std::abs(expectation(number_operator(1, l), fock2) - 2.0) < 1e-14);

  // Truncated thermal state: p_n ∝ q^n, q = nbar / (1 + nbar).
  const double nbar = 0.5, q = nbar / (1.0 + nbar);
  const int nmax = l.n_max1();
  DenseMat rho = DenseMat::Zero(l.dim(), l.dim());
  double z = 0.0;
  for (int n = 0; n <= nmax; ++n) z += std::pow(q, n);
  for (int n = 0; n <= nmax; ++n) rho(l.index(Level::g, n, 0), l.index(Level::g, n, 0)) = std::pow(q, n) / z;
  const double closed = q / (1.0 - q) - (nmax + 1) * std::pow(q, nmax + 1) / (1.0 - std::pow(q, nmax + 1));
  const cplx n1 = expectation(number_operator(1, l), DensityMatrix(l, rho));
  CHECK(std::abs(n1 - closed) < 1e-12);
  CHECK(std::abs(n1 - nbar) < 1e-12);
}

TEST_CASE("density matrix invariants") {
  const SpaceLayout l(1, 1);
  DensityMatrix rho(l, test::random_density(l.dim(), 3));
  CHECK_NOTHROW(rho.validate());
  CHECK(rho.min_eigenvalue() >= 0.0);
  CHECK(rho.purity() <= 1.0);
  DenseMat bad = rho.matrix() * 1.01;
  CHECK_THROWS_AS(DensityMatrix(l, bad).validate(), SolverError);
  DensityMatrix fixed(l, bad);
  fixed.hermitize_and_normalize();
  CHECK(std::abs(fixed.trace() - 1.0) < 1e-14);
  CHECK_THROWS_AS(DensityMatrix(l, DenseMat::Identity(3, 3)), InvalidArgument);
}

TEST_CASE("operator algebra and matrix market output") {
  const SpaceLayout l(1, 1);
  const ComplexOperator a = annihilator(1, l);
  CHECK(a.hermiticity_defect() > 0.5);
  CHECK((a + a.adjoint()).is_hermitian());
  CHECK_THROWS_AS(a + annihilator(1, SpaceLayout(2, 1)), InvalidArgument);
  std::ostringstream os;
  write_matrix_market(os, a);
  CHECK(os.str().find("16 16 8") != std::string::npos);
}
