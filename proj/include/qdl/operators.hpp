#pragma once

// Operator algebra on the truncated space  QD(4) ⊗ Fock(n_max1) ⊗ Fock(n_max2).
//
// Basis ordering: |g>,|x>,|y>,|u>  ⊗  |n1 = 0..n_max1>  ⊗  |n2 = 0..n_max2>,
// with the mode-2 photon number running fastest:
//
//   index(level, n1, n2) = (level * (n_max1 + 1) + n1) * (n_max2 + 1) + n2
//
// All energies are in units of the cavity coupling g and hbar = 1.

#include <complex>
#include <iosfwd>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qdl/error.hpp"

namespace qdl {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using DenseMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

enum class Level : int { g = 0, x = 1, y = 2, u = 3 };

Level parse_level(std::string_view label);
char level_label(Level level);

/// Number of dot excitations carried by a level (g:0, x:1, y:1, u:2).
int excitation_count(Level level);

struct BasisState {
  Level level;
  int n1;
  int n2;
};

class SpaceLayout {
 public:
  static constexpr int qd_dim = 4;

  SpaceLayout(int n_max1, int n_max2);

  int n_max1() const { return n_max1_; }
  int n_max2() const { return n_max2_; }
  int dim() const { return qd_dim * (n_max1_ + 1) * (n_max2_ + 1); }

  int index(Level level, int n1, int n2) const;
  int index(const BasisState& s) const { return index(s.level, s.n1, s.n2); }
  BasisState state(int index) const;

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  int n_max1_;
  int n_max2_;
};

class ComplexOperator {
 public:
  ComplexOperator(SpaceLayout layout, SparseMat matrix);

  static ComplexOperator zero(const SpaceLayout& layout);
  static ComplexOperator identity(const SpaceLayout& layout);
  static ComplexOperator from_dense(const SpaceLayout& layout, const DenseMat& m,
                                    double drop_below = 0.0);

  const SpaceLayout& layout() const { return layout_; }
  const SparseMat& matrix() const { return m_; }
  int dim() const { return layout_.dim(); }
  DenseMat dense() const { return DenseMat(m_); }

  ComplexOperator adjoint() const;
  /// max |O - O^dagger| over all entries.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-10) const { return hermiticity_defect() <= tol; }

  cplx at(int row, int col) const { return m_.coeff(row, col); }

  ComplexOperator& operator+=(const ComplexOperator& other);
  ComplexOperator& operator-=(const ComplexOperator& other);
  ComplexOperator& operator*=(cplx scale);

  friend ComplexOperator operator+(ComplexOperator a, const ComplexOperator& b) { return a += b; }
  friend ComplexOperator operator-(ComplexOperator a, const ComplexOperator& b) { return a -= b; }
  friend ComplexOperator operator*(ComplexOperator a, cplx s) { return a *= s; }
  friend ComplexOperator operator*(cplx s, ComplexOperator a) { return a *= s; }
  friend ComplexOperator operator*(double s, ComplexOperator a) { return a *= cplx(s); }
  friend ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b);

 private:
  SpaceLayout layout_;
  SparseMat m_;
};

class DensityMatrix {
 public:
  DensityMatrix(SpaceLayout layout, DenseMat entries);

  /// |s><s| for a single basis state.
  static DensityMatrix basis_state(const SpaceLayout& layout, const BasisState& s);
  static DensityMatrix maximally_mixed(const SpaceLayout& layout);

  const SpaceLayout& layout() const { return layout_; }
  const DenseMat& matrix() const { return rho_; }
  DenseMat& matrix() { return rho_; }

  cplx trace() const { return rho_.trace(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  double purity() const;

  /// rho <- (rho + rho^dagger)/2, then rho <- rho / Tr rho.
  void hermitize_and_normalize();

  /// Throws SolverError when trace, Hermiticity or positivity are off.
  void validate(double trace_tol = 1e-10, double herm_tol = 1e-10, double neg_tol = 1e-8) const;

 private:
  SpaceLayout layout_;
  DenseMat rho_;
};

/// |i><j| ⊗ 1 ⊗ 1.
ComplexOperator qd_projector(Level i, Level j, const SpaceLayout& layout);
ComplexOperator qd_projector(std::string_view i, std::string_view j, const SpaceLayout& layout);

/// Truncated lowering operator of cavity mode 1 or 2, embedded in the full space.
ComplexOperator annihilator(int mode, const SpaceLayout& layout);
ComplexOperator creator(int mode, const SpaceLayout& layout);
ComplexOperator number_operator(int mode, const SpaceLayout& layout);

/// Embeds a 4x4 dot operator and two single-mode operators as A ⊗ B ⊗ C.
ComplexOperator embed(const DenseMat& dot, const DenseMat& mode1, const DenseMat& mode2,
                      const SpaceLayout& layout);

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  DenseMat vectors;        // columns are eigenvectors
};

Eigensystem hermitian_eigendecomposition(const ComplexOperator& h, double herm_tol = 1e-10);
Eigensystem hermitian_eigendecomposition(const DenseMat& h, double herm_tol = 1e-10);

/// Tr[O rho].
cplx expectation(const ComplexOperator& op, const DensityMatrix& rho);

/// One "row col re im" line per stored entry, 0-based indices, after a
/// matrix-market style size header.
void write_matrix_market(std::ostream& out, const ComplexOperator& op);

}  // namespace qdl
