#include "qdl/superoperator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qdl {

using RowSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor, int>;

LiouvilleBasis::LiouvilleBasis(SpaceLayout layout, std::vector<long> labels)
    : layout_(layout), labels_(std::move(labels)) {
  const int d = layout_.dim();
  if (static_cast<int>(labels_.size()) != d) throw InvalidArgument("one symmetry label per basis state required");
  lookup_.assign(static_cast<std::size_t>(d) * d, -1);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      if (labels_[r] != labels_[c]) continue;
      lookup_[static_cast<std::size_t>(r) + std::size_t(d) * c] = static_cast<int>(rows_.size());
      rows_.push_back(r);
      cols_.push_back(c);
    }
  }
  diagonal_.resize(d);
  for (int i = 0; i < d; ++i) diagonal_[i] = index(i, i);
}

std::shared_ptr<const LiouvilleBasis> LiouvilleBasis::full(const SpaceLayout& layout) {
  return std::shared_ptr<const LiouvilleBasis>(new LiouvilleBasis(layout, std::vector<long>(layout.dim(), 0)));
}

std::shared_ptr<const LiouvilleBasis> LiouvilleBasis::sector(const SpaceLayout& layout,
                                                             std::vector<long> labels) {
  return std::shared_ptr<const LiouvilleBasis>(new LiouvilleBasis(layout, std::move(labels)));
}

CVec LiouvilleBasis::vectorize(const DenseMat& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) throw InvalidArgument("rho dimension does not match basis");
  CVec v(size());
  for (int k = 0; k < size(); ++k) v[k] = rho(rows_[k], cols_[k]);
  return v;
}

DenseMat LiouvilleBasis::unvectorize(const CVec& v) const {
  if (v.size() != size()) throw InvalidArgument("vector length does not match basis");
  DenseMat rho = DenseMat::Zero(dim(), dim());
  for (int k = 0; k < size(); ++k) rho(rows_[k], cols_[k]) = v[k];
  return rho;
}

// ---------------------------------------------------------------------------

OpPtr share(const ComplexOperator& op) { return std::make_shared<const SparseMat>(op.matrix()); }
OpPtr share(SparseMat m) {
  m.makeCompressed();
  return std::make_shared<const SparseMat>(std::move(m));
}

SandwichList commutator_terms(const ComplexOperator& h) {
  const OpPtr hp = share(h);
  return {{-kI, hp, nullptr}, {kI, nullptr, hp}};
}

SandwichList dissipator_terms(const ComplexOperator& c, double rate) {
  if (rate < 0.0) throw InvalidArgument("dissipator rate must be non-negative");
  const ComplexOperator cd = c.adjoint();
  const OpPtr cp = share(c);
  const OpPtr cdp = share(cd);
  const OpPtr cdc = share(cd * c);
  return {{rate, cp, cdp}, {-0.5 * rate, cdc, nullptr}, {-0.5 * rate, nullptr, cdc}};
}

DenseMat apply_terms(const SandwichList& terms, const DenseMat& rho) {
  DenseMat out = DenseMat::Zero(rho.rows(), rho.cols());
  for (const auto& t : terms) {
    if (t.left && t.right) {
      const DenseMat lr = (*t.left) * rho;
      out.noalias() += t.coeff * (lr * (*t.right));
    } else if (t.left) {
      out.noalias() += t.coeff * ((*t.left) * rho);
    } else if (t.right) {
      out.noalias() += t.coeff * (rho * (*t.right));
    } else {
      out += t.coeff * rho;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Superoperator::Superoperator(BasisPtr basis, SparseMat matrix) : basis_(std::move(basis)), m_(std::move(matrix)) {
  if (!basis_) throw InvalidArgument("superoperator needs a basis");
  if (m_.rows() != basis_->size() || m_.cols() != basis_->size()) {
    throw InvalidArgument("superoperator dimension does not match its basis");
  }
  m_.makeCompressed();
}

Superoperator Superoperator::zero(BasisPtr basis) {
  const int n = basis->size();
  return {std::move(basis), SparseMat(n, n)};
}

DenseMat Superoperator::apply(const DenseMat& rho) const {
  return basis_->unvectorize(m_ * basis_->vectorize(rho));
}

double Superoperator::trace_defect() const {
  // Row functional Tr = sum over diagonal pairs; (Tr∘L)_col = sum_{diag rows} L(row, col).
  std::vector<char> is_diag(static_cast<std::size_t>(basis_->size()), 0);
  for (int k : basis_->diagonal()) {
    if (k >= 0) is_diag[k] = 1;
  }
  double worst = 0.0;
  for (int c = 0; c < m_.outerSize(); ++c) {
    cplx s = 0.0;
    for (SparseMat::InnerIterator it(m_, c); it; ++it) {
      if (is_diag[it.row()]) s += it.value();
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

Superoperator& Superoperator::operator+=(const Superoperator& other) {
  if (basis_ != other.basis_ && !(basis_->layout() == other.basis_->layout() && basis_->size() == other.basis_->size())) {
    throw InvalidArgument("superoperator bases differ");
  }
  m_ = m_ + other.m_;
  return *this;
}

Superoperator& Superoperator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------

namespace {

struct PreparedTerm {
  cplx coeff;
  const SparseMat* left;   // column access: col j -> (i, A_ij)
  RowSparse right;         // row access: row k -> (l, B_kl)
  bool has_right;
};

}  // namespace

Superoperator assemble(const BasisPtr& basis, const SandwichList& terms, Execution exec) {
  const int n = basis->size();
  const int d = basis->dim();
  std::vector<PreparedTerm> prepared;
  prepared.reserve(terms.size());
  for (const auto& t : terms) {
    if ((t.left && (t.left->rows() != d || t.left->cols() != d)) ||
        (t.right && (t.right->rows() != d || t.right->cols() != d))) {
      throw InvalidArgument("sandwich operator dimension does not match basis");
    }
    PreparedTerm p{t.coeff, t.left.get(), {}, bool(t.right)};
    if (t.right) p.right = RowSparse(*t.right);
    prepared.push_back(std::move(p));
  }

  std::vector<std::vector<std::pair<int, cplx>>> columns(static_cast<std::size_t>(n));
  double leaked = 0.0;

#pragma omp parallel for schedule(dynamic, 64) reduction(max : leaked) if (exec == Execution::parallel)
  for (int s = 0; s < n; ++s) {
    const int j = basis->row(s);
    const int k = basis->col(s);
    auto& col = columns[s];
    auto emit = [&](int i, int l, cplx v) {
      const int t = basis->index(i, l);
      if (t >= 0) {
        col.emplace_back(t, v);
      } else {
        leaked = std::max(leaked, std::abs(v));
      }
    };
    for (const auto& p : prepared) {
      if (p.left && p.has_right) {
        for (SparseMat::InnerIterator a(*p.left, j); a; ++a) {
          const cplx ca = p.coeff * a.value();
          for (RowSparse::InnerIterator b(p.right, k); b; ++b) emit(int(a.row()), int(b.col()), ca * b.value());
        }
      } else if (p.left) {
        for (SparseMat::InnerIterator a(*p.left, j); a; ++a) emit(int(a.row()), k, p.coeff * a.value());
      } else if (p.has_right) {
        for (RowSparse::InnerIterator b(p.right, k); b; ++b) emit(j, int(b.col()), p.coeff * b.value());
      } else {
        emit(j, k, p.coeff);
      }
    }
    std::sort(col.begin(), col.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (w > 0 && col[w - 1].first == col[r].first) {
        col[w - 1].second += col[r].second;
      } else {
        col[w++] = col[r];
      }
    }
    col.resize(w);
    std::erase_if(col, [](const auto& e) { return e.second == cplx(0.0); });
  }

  if (leaked > 1e-12) {
    throw InvalidArgument("generator couples the retained symmetry sector to discarded pairs (magnitude " +
                          std::to_string(leaked) + ")");
  }

  SparseMat m(n, n);
  std::size_t nnz = 0;
  for (const auto& c : columns) nnz += c.size();
  m.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  int* outer = m.outerIndexPtr();
  int* inner = m.innerIndexPtr();
  cplx* values = m.valuePtr();
  std::size_t pos = 0;
  for (int s = 0; s < n; ++s) {
    outer[s] = static_cast<int>(pos);
    for (const auto& [r, v] : columns[s]) {
      inner[pos] = r;
      values[pos] = v;
      ++pos;
    }
  }
  outer[n] = static_cast<int>(pos);
  return {basis, std::move(m)};
}

Superoperator dissipator(const ComplexOperator& c, double rate, BasisPtr basis) {
  if (!basis) basis = LiouvilleBasis::full(c.layout());
  return assemble(basis, dissipator_terms(c, rate));
}

Superoperator hamiltonian_commutator(const ComplexOperator& h, BasisPtr basis, double herm_tol) {
  const double defect = h.hermiticity_defect();
  if (defect > herm_tol) {
    throw InvalidArgument("Hamiltonian is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  if (!basis) basis = LiouvilleBasis::full(h.layout());
  return assemble(basis, commutator_terms(h));
}

}  // namespace qdl
