// Serial Kronecker-product assembly. Kept as the reference path that the
// column-parallel assembler is checked against.

#include <unsupported/Eigen/KroneckerProduct>

#include "qdl/superoperator.hpp"

namespace qdl {

Superoperator assemble_reference(const BasisPtr& basis, const SandwichList& terms) {
  const int d = basis->dim();
  SparseMat id(d, d);
  id.setIdentity();

  SparseMat full(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (const auto& t : terms) {
    const SparseMat& a = t.left ? *t.left : id;
    const SparseMat& b = t.right ? *t.right : id;
    const SparseMat bt = b.transpose();
    SparseMat kron = Eigen::kroneckerProduct(bt, a);
    full += t.coeff * kron;
  }

  const int n = basis->size();
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int c = 0; c < full.outerSize(); ++c) {
    const int sc = basis->index(c % d, c / d);
    if (sc < 0) continue;
    for (SparseMat::InnerIterator it(full, c); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int sr = basis->index(r % d, r / d);
      if (sr >= 0) trips.emplace_back(sr, sc, it.value());
    }
  }
  SparseMat m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return {basis, std::move(m)};
}

}  // namespace qdl
