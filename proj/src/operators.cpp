#include "qdl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

namespace qdl {

Level parse_level(std::string_view label) {
  if (label == "g") return Level::g;
  if (label == "x") return Level::x;
  if (label == "y") return Level::y;
  if (label == "u") return Level::u;
  throw InvalidArgument("unknown dot level label '" + std::string(label) + "'");
}

char level_label(Level level) {
  static constexpr char labels[] = {'g', 'x', 'y', 'u'};
  return labels[static_cast<int>(level)];
}

int excitation_count(Level level) {
  switch (level) {
    case Level::g: return 0;
    case Level::x:
    case Level::y: return 1;
    case Level::u: return 2;
  }
  return 0;
}

SpaceLayout::SpaceLayout(int n_max1, int n_max2) : n_max1_(n_max1), n_max2_(n_max2) {
  if (n_max1 < 1 || n_max2 < 1) {
    throw InvalidArgument("Fock truncation must be >= 1 for both modes");
  }
}

int SpaceLayout::index(Level level, int n1, int n2) const {
  if (n1 < 0 || n1 > n_max1_ || n2 < 0 || n2 > n_max2_) throw InvalidArgument("photon number outside the truncation");
  return (static_cast<int>(level) * (n_max1_ + 1) + n1) * (n_max2_ + 1) + n2;
}

BasisState SpaceLayout::state(int index) const {
  const int n2 = index % (n_max2_ + 1);
  const int rest = index / (n_max2_ + 1);
  return {static_cast<Level>(rest / (n_max1_ + 1)), rest % (n_max1_ + 1), n2};
}

// ---------------------------------------------------------------------------

ComplexOperator::ComplexOperator(SpaceLayout layout, SparseMat matrix)
    : layout_(layout), m_(std::move(matrix)) {
  if (m_.rows() != layout_.dim() || m_.cols() != layout_.dim()) {
    throw InvalidArgument("operator dimension does not match its layout");
  }
  m_.makeCompressed();
}

ComplexOperator ComplexOperator::zero(const SpaceLayout& layout) {
  return {layout, SparseMat(layout.dim(), layout.dim())};
}

ComplexOperator ComplexOperator::identity(const SpaceLayout& layout) {
  SparseMat id(layout.dim(), layout.dim());
  id.setIdentity();
  return {layout, std::move(id)};
}

ComplexOperator ComplexOperator::from_dense(const SpaceLayout& layout, const DenseMat& m,
                                            double drop_below) {
  if (m.rows() != layout.dim() || m.cols() != layout.dim()) {
    throw InvalidArgument("dense matrix dimension does not match layout");
  }
  std::vector<Eigen::Triplet<cplx>> trips;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > drop_below) trips.emplace_back(int(r), int(c), m(r, c));
    }
  }
  SparseMat s(layout.dim(), layout.dim());
  s.setFromTriplets(trips.begin(), trips.end());
  return {layout, std::move(s)};
}

ComplexOperator ComplexOperator::adjoint() const {
  return {layout_, SparseMat(m_.adjoint())};
}

double ComplexOperator::hermiticity_defect() const {
  const SparseMat diff = m_ - SparseMat(m_.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

ComplexOperator& ComplexOperator::operator+=(const ComplexOperator& other) {
  if (!(layout_ == other.layout_)) throw InvalidArgument("layout mismatch in operator sum");
  m_ = m_ + other.m_;
  return *this;
}

ComplexOperator& ComplexOperator::operator-=(const ComplexOperator& other) {
  if (!(layout_ == other.layout_)) throw InvalidArgument("layout mismatch in operator difference");
  m_ = m_ - other.m_;
  return *this;
}

ComplexOperator& ComplexOperator::operator*=(cplx scale) {
  m_ *= scale;
  return *this;
}

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b) {
  if (!(a.layout() == b.layout())) throw InvalidArgument("layout mismatch in operator product");
  return {a.layout(), SparseMat(a.matrix() * b.matrix())};
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(SpaceLayout layout, DenseMat entries)
    : layout_(layout), rho_(std::move(entries)) {
  if (rho_.rows() != layout_.dim() || rho_.cols() != layout_.dim()) {
    throw InvalidArgument("density matrix dimension does not match its layout");
  }
}

DensityMatrix DensityMatrix::basis_state(const SpaceLayout& layout, const BasisState& s) {
  DenseMat rho = DenseMat::Zero(layout.dim(), layout.dim());
  const int k = layout.index(s);
  rho(k, k) = 1.0;
  return {layout, std::move(rho)};
}

DensityMatrix DensityMatrix::maximally_mixed(const SpaceLayout& layout) {
  const int d = layout.dim();
  return {layout, DenseMat::Identity(d, d) / double(d)};
}

double DensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const DenseMat h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

void DensityMatrix::hermitize_and_normalize() {
  rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  const cplx tr = rho_.trace();
  if (std::abs(tr) == 0.0) throw SolverError("density matrix has zero trace");
  rho_ /= tr.real();
}

void DensityMatrix::validate(double trace_tol, double herm_tol, double neg_tol) const {
  const cplx tr = trace();
  if (std::abs(tr - 1.0) > trace_tol) {
    throw SolverError("density matrix trace deviates from 1 by " + std::to_string(std::abs(tr - 1.0)));
  }
  if (hermiticity_defect() > herm_tol) throw SolverError("density matrix is not Hermitian");
  const double lmin = min_eigenvalue();
  if (lmin < -neg_tol) {
    throw SolverError("density matrix has negative eigenvalue " + std::to_string(lmin));
  }
}

// ---------------------------------------------------------------------------

ComplexOperator embed(const DenseMat& dot, const DenseMat& mode1, const DenseMat& mode2,
                      const SpaceLayout& layout) {
  if (dot.rows() != 4 || mode1.rows() != layout.n_max1() + 1 || mode2.rows() != layout.n_max2() + 1) {
    throw InvalidArgument("factor dimensions do not match layout");
  }
  const DenseMat full = Eigen::kroneckerProduct(dot, Eigen::kroneckerProduct(mode1, mode2).eval()).eval();
  return ComplexOperator::from_dense(layout, full);
}

ComplexOperator qd_projector(Level i, Level j, const SpaceLayout& layout) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int n1 = 0; n1 <= layout.n_max1(); ++n1) {
    for (int n2 = 0; n2 <= layout.n_max2(); ++n2) {
      trips.emplace_back(layout.index(i, n1, n2), layout.index(j, n1, n2), 1.0);
    }
  }
  SparseMat m(layout.dim(), layout.dim());
  m.setFromTriplets(trips.begin(), trips.end());
  return {layout, std::move(m)};
}

ComplexOperator qd_projector(std::string_view i, std::string_view j, const SpaceLayout& layout) {
  return qd_projector(parse_level(i), parse_level(j), layout);
}

ComplexOperator annihilator(int mode, const SpaceLayout& layout) {
  if (mode != 1 && mode != 2) throw InvalidArgument("cavity mode index must be 1 or 2");
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int l = 0; l < 4; ++l) {
    const auto level = static_cast<Level>(l);
    for (int n1 = 0; n1 <= layout.n_max1(); ++n1) {
      for (int n2 = 0; n2 <= layout.n_max2(); ++n2) {
        const int n = mode == 1 ? n1 : n2;
        if (n == 0) continue;
        const int target = mode == 1 ? layout.index(level, n1 - 1, n2) : layout.index(level, n1, n2 - 1);
        trips.emplace_back(target, layout.index(level, n1, n2), std::sqrt(double(n)));
      }
    }
  }
  SparseMat m(layout.dim(), layout.dim());
  m.setFromTriplets(trips.begin(), trips.end());
  return {layout, std::move(m)};
}

ComplexOperator creator(int mode, const SpaceLayout& layout) { return annihilator(mode, layout).adjoint(); }

ComplexOperator number_operator(int mode, const SpaceLayout& layout) {
  const auto a = annihilator(mode, layout);
  return a.adjoint() * a;
}

Eigensystem hermitian_eigendecomposition(const DenseMat& h, double herm_tol) {
  if (h.rows() != h.cols()) throw InvalidArgument("eigendecomposition needs a square matrix");
  const double defect = h.size() ? (h - h.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (defect > herm_tol) {
    throw InvalidArgument("eigendecomposition input is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  Eigen::SelfAdjointEigenSolver<DenseMat> es(h);
  if (es.info() != Eigen::Success) throw SolverError("Hermitian eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigensystem hermitian_eigendecomposition(const ComplexOperator& h, double herm_tol) {
  return hermitian_eigendecomposition(h.dense(), herm_tol);
}

cplx expectation(const ComplexOperator& op, const DensityMatrix& rho) {
  if (!(op.layout() == rho.layout())) throw InvalidArgument("layout mismatch in expectation value");
  // Tr[O rho] = sum_{ij} O_ij rho_ji
  cplx sum = 0.0;
  const SparseMat& m = op.matrix();
  for (int j = 0; j < m.outerSize(); ++j) {
    for (SparseMat::InnerIterator it(m, j); it; ++it) sum += it.value() * rho.matrix()(j, it.row());
  }
  return sum;
}

void write_matrix_market(std::ostream& out, const ComplexOperator& op) {
  const SparseMat& m = op.matrix();
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << "% 0-based indices: row col re im\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int j = 0; j < m.outerSize(); ++j) {
    for (SparseMat::InnerIterator it(m, j); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    }
  }
}

}  // namespace qdl
