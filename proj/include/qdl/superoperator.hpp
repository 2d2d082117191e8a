#pragma once

// Superoperators acting on column-stacked density matrices.
//
// A pair (row i, col j) of rho sits at vector position i + D*j in the full
// Liouville space, so a term  c * A rho B  is the matrix  c * (B^T ⊗ A).
// A LiouvilleBasis may retain only a subset of the pairs (a symmetry
// sector); the retained pairs keep their column-stacked order.

#include <memory>
#include <span>
#include <vector>

#include "qdl/operators.hpp"

namespace qdl {

enum class Execution { serial, parallel };

class LiouvilleBasis {
 public:
  /// All D*D pairs.
  static std::shared_ptr<const LiouvilleBasis> full(const SpaceLayout& layout);
  /// Pairs (i, j) with labels[i] == labels[j].
  static std::shared_ptr<const LiouvilleBasis> sector(const SpaceLayout& layout,
                                                      std::vector<long> labels);

  const SpaceLayout& layout() const { return layout_; }
  int dim() const { return layout_.dim(); }
  int size() const { return static_cast<int>(rows_.size()); }
  bool is_full() const { return size() == dim() * dim(); }

  /// Position of pair (row, col), or -1 when the pair is not retained.
  int index(int row, int col) const { return lookup_[static_cast<std::size_t>(row) + std::size_t(dim()) * col]; }
  int row(int k) const { return rows_[k]; }
  int col(int k) const { return cols_[k]; }

  /// Positions of the diagonal pairs (i, i), i = 0..D-1.
  const std::vector<int>& diagonal() const { return diagonal_; }
  /// Symmetry label per basis state (all zero for the full basis).
  const std::vector<long>& labels() const { return labels_; }

  CVec vectorize(const DenseMat& rho) const;
  DenseMat unvectorize(const CVec& v) const;

 private:
  LiouvilleBasis(SpaceLayout layout, std::vector<long> labels);

  SpaceLayout layout_;
  std::vector<long> labels_;
  std::vector<int> rows_, cols_;
  std::vector<int> lookup_;
  std::vector<int> diagonal_;
};

using BasisPtr = std::shared_ptr<const LiouvilleBasis>;
using OpPtr = std::shared_ptr<const SparseMat>;

/// coeff * left * rho * right; a null side means the identity.
struct Sandwich {
  cplx coeff;
  OpPtr left;
  OpPtr right;
};

using SandwichList = std::vector<Sandwich>;

OpPtr share(const ComplexOperator& op);
OpPtr share(SparseMat m);

/// -i[H, rho].
SandwichList commutator_terms(const ComplexOperator& h);
/// rate * (C rho C^dag - 1/2 {C^dag C, rho}).
SandwichList dissipator_terms(const ComplexOperator& c, double rate);

/// Direct evaluation of a sandwich list on a dense rho (no superoperator).
DenseMat apply_terms(const SandwichList& terms, const DenseMat& rho);

class Superoperator {
 public:
  Superoperator(BasisPtr basis, SparseMat matrix);
  static Superoperator zero(BasisPtr basis);

  const LiouvilleBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const SparseMat& matrix() const { return m_; }

  CVec apply(const CVec& v) const { return m_ * v; }
  DenseMat apply(const DenseMat& rho) const;

  /// max over columns of |sum of the diagonal-pair rows| = deviation of Tr∘L from 0.
  double trace_defect() const;
  /// Frobenius norm of the matrix.
  double norm() const { return m_.norm(); }

  Superoperator& operator+=(const Superoperator& other);
  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
  Superoperator& operator*=(cplx s);

 private:
  BasisPtr basis_;
  SparseMat m_;
};

/// Column-parallel direct assembly of a sandwich list. Throws when a term
/// maps a retained pair onto a discarded one (sector is not invariant).
Superoperator assemble(const BasisPtr& basis, const SandwichList& terms,
                       Execution exec = Execution::parallel);

/// Serial Kronecker-product route, restricted to the basis afterwards.
/// Reference for tests and benchmarks; builds the full D^2 x D^2 matrix.
Superoperator assemble_reference(const BasisPtr& basis, const SandwichList& terms);

Superoperator dissipator(const ComplexOperator& c, double rate, BasisPtr basis = nullptr);
Superoperator hamiltonian_commutator(const ComplexOperator& h, BasisPtr basis = nullptr,
                                     double herm_tol = 1e-10);

}  // namespace qdl
