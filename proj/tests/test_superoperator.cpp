#include <doctest.h>

#include <cmath>

#include "qdl/model.hpp"
#include "qdl/steady_state.hpp"
#include "qdl/superoperator.hpp"
#include "test_util.hpp"

using namespace qdl;

namespace {

DenseMat fock_projector(const SpaceLayout& l, int n1, int n1p) {
  DenseMat m = DenseMat::Zero(l.dim(), l.dim());
  m(l.index(Level::g, n1, 0), l.index(Level::g, n1p, 0)) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("column-stacked vectorization") {
  const SpaceLayout l(1, 1);
  const BasisPtr full = LiouvilleBasis::full(l);
  CHECK(full->size() == 256);
  CHECK(full->index(2, 3) == 2 + 16 * 3);
  const DenseMat rho = test::random_matrix(16, 1);
  CHECK((full->unvectorize(full->vectorize(rho)) - rho).norm() == 0.0);
  CHECK(full->diagonal().size() == 16);
}

TEST_CASE("symmetry sector keeps equal-label pairs") {
  const SystemParams p = test::working_point(2);
  const BasisPtr s = LiouvilleBasis::sector(p.layout, symmetry_labels(p));
  CHECK(s->size() < p.layout.dim() * p.layout.dim());
  for (int k = 0; k < s->size(); ++k) CHECK(s->labels()[s->row(k)] == s->labels()[s->col(k)]);
  CHECK(static_cast<int>(s->diagonal().size()) == p.layout.dim());
}

TEST_CASE("dissipator of cavity decay") {
  const SpaceLayout l(3, 1);
  const double kappa = 0.3;
  const Superoperator d = dissipator(annihilator(1, l), kappa);
  CHECK(d.apply(fock_projector(l, 0, 0)).norm() == 0.0);
  const DenseMat out = d.apply(fock_projector(l, 1, 1));
  CHECK((out - kappa * (fock_projector(l, 0, 0) - fock_projector(l, 1, 1))).norm() < 1e-14);
  CHECK(d.trace_defect() < 1e-14);
  CHECK_THROWS_AS(dissipator(annihilator(1, l), -1.0), InvalidArgument);
}

TEST_CASE("dissipator preserves the trace of random states") {
  const SpaceLayout l(1, 1);
  for (unsigned seed = 0; seed < 4; ++seed) {
    const ComplexOperator c = ComplexOperator::from_dense(l, test::random_matrix(l.dim(), 100 + seed));
    const Superoperator d = dissipator(c, 0.7);
    const DenseMat rho = test::random_density(l.dim(), 200 + seed);
    CHECK(std::abs(d.apply(rho).trace()) < 1e-12);
    CHECK(d.trace_defect() < 1e-12);
  }
}

TEST_CASE("hamiltonian commutator") {
  const SpaceLayout l(1, 1);
  CHECK(hamiltonian_commutator(ComplexOperator::identity(l)).matrix().norm() < 1e-14);

  const DenseMat a = test::random_matrix(l.dim(), 7);
  const ComplexOperator h = ComplexOperator::from_dense(l, a + a.adjoint());
  const Eigensystem e = hermitian_eigendecomposition(h);
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(l.dim(), 0.1, 0.9);
  w /= w.sum();
  const DenseMat rho = e.vectors * w.cast<cplx>().asDiagonal() * e.vectors.adjoint();
  const Superoperator lh = hamiltonian_commutator(h);
  CHECK(lh.apply(rho).norm() < 1e-12);
  CHECK_THROWS_AS(hamiltonian_commutator(ComplexOperator::from_dense(l, a)), InvalidArgument);

  // Unitary evolution keeps eigenbasis populations fixed.
  DensityMatrix rho0(l, test::random_density(l.dim(), 8));
  const DensityMatrix rho_t = time_evolve(lh, rho0, 0.5, 0.05 / spectral_norm_estimate(lh));
  const DenseMat p0 = e.vectors.adjoint() * rho0.matrix() * e.vectors;
  const DenseMat pt = e.vectors.adjoint() * rho_t.matrix() * e.vectors;
  CHECK((p0.diagonal() - pt.diagonal()).norm() < 1e-8);
}

TEST_CASE("direct assembly matches the Kronecker reference") {
  const SystemParams p = test::working_point(2);
  const LiouvillianBundle b = build_full_liouvillian(p, test::kernels_at(5.0));
  SandwichList all;
  for (const auto& t : b.terms) all.insert(all.end(), t.terms.begin(), t.terms.end());
  const BasisPtr sector = LiouvilleBasis::sector(p.layout, symmetry_labels(p));
  const Superoperator fast = assemble(sector, all, Execution::parallel);
  const Superoperator serial = assemble(sector, all, Execution::serial);
  const Superoperator ref = assemble_reference(sector, all);
  CHECK(SparseMat(fast.matrix() - ref.matrix()).norm() < 1e-12 * ref.norm());
  CHECK(SparseMat(fast.matrix() - serial.matrix()).norm() == 0.0);
  CHECK(SparseMat(fast.matrix() - b.generator.matrix()).norm() < 1e-12 * ref.norm());

  const BasisPtr full = LiouvilleBasis::full(p.layout);
  const Superoperator f = assemble(full, all);
  const DenseMat rho = test::random_density(p.layout.dim(), 5);
  CHECK((f.apply(rho) - apply_terms(all, rho)).norm() < 1e-12 * f.norm());
}

TEST_CASE("sector assembly rejects non-invariant terms") {
  const SystemParams p = test::working_point(1);
  const BasisPtr sector = LiouvilleBasis::sector(p.layout, symmetry_labels(p));
  const ComplexOperator drive = annihilator(1, p.layout) + creator(1, p.layout);
  CHECK_THROWS_AS(assemble(sector, commutator_terms(drive)), InvalidArgument);
}
