#pragma once

// Dense symmetric positive-definite matrices with a cached Cholesky factor,
// plus the block-precision identities behind the rank-one-plus-diagonal
// covariance diag(v^2) + sigma^2 11'.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "owenext/errors.hpp"

namespace owenext {

/// Row-major dense square matrix. No structural invariants.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}
  SquareMatrix(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (data_.size() != dim_ * dim_) {
      throw DomainError("SquareMatrix: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                        std::to_string(data_.size()));
    }
  }

  static SquareMatrix identity(std::size_t dim) {
    SquareMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dim_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  SquareMatrix transposed() const {
    SquareMatrix t(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend SquareMatrix operator*(const SquareMatrix& lhs, const SquareMatrix& rhs) {
    if (lhs.dim_ != rhs.dim_) throw DomainError("SquareMatrix: dimension mismatch in product");
    const std::size_t n = lhs.dim_;
    SquareMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double a = lhs(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
      }
    return out;
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline double frobenius_distance(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("frobenius_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double frobenius_norm(const SquareMatrix& a) { return frobenius_distance(a, SquareMatrix(a.dim())); }

/// Symmetric positive-definite matrix. Immutable; the lower Cholesky factor
/// is computed and validated at construction.
class PdMatrix {
 public:
  static constexpr double kAsymmetryTolerance = 1e-8;
  static constexpr double kPivotTolerance = 1e-12;

  /// Symmetrizes (M + M')/2 and factors. Rejects asymmetry beyond
  /// 1e-8 relative to the largest entry and pivots at or below
  /// dim * 1e-12 * max diagonal.
  static PdMatrix from_entries(std::size_t dim, std::span<const double> entries) {
    if (dim == 0) throw DomainError("PdMatrix: dimension must be positive");
    if (entries.size() != dim * dim) {
      throw DomainError("PdMatrix: expected " + std::to_string(dim * dim) + " entries, got " +
                        std::to_string(entries.size()));
    }
    double scale = 0.0;
    for (double x : entries) {
      if (!std::isfinite(x)) throw DomainError("PdMatrix: entries must be finite");
      scale = std::max(scale, std::abs(x));
    }
    SquareMatrix sym(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        const double aij = entries[i * dim + j];
        const double aji = entries[j * dim + i];
        if (std::abs(aij - aji) > kAsymmetryTolerance * scale) {
          throw DomainError("PdMatrix: entries (" + std::to_string(i) + "," + std::to_string(j) +
                            ") and (" + std::to_string(j) + "," + std::to_string(i) +
                            ") differ beyond tolerance");
        }
        sym(i, j) = 0.5 * (aij + aji);
      }
    return PdMatrix(std::move(sym));
  }

  static PdMatrix from_entries(const SquareMatrix& m) { return from_entries(m.dim(), m.data()); }

  static PdMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    flat.reserve(rows.size() * rows.size());
    for (const auto& row : rows) {
      if (row.size() != rows.size()) throw DomainError("PdMatrix: rows must form a square matrix");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return from_entries(rows.size(), flat);
  }

  static PdMatrix identity(std::size_t dim) { return from_entries(SquareMatrix::identity(dim)); }

  std::size_t dim() const noexcept { return entries_.dim(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  const SquareMatrix& entries() const noexcept { return entries_; }
  /// Lower-triangular L with L L' = entries().
  const SquareMatrix& chol() const noexcept { return chol_; }

  double log_determinant() const noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) sum += std::log(chol_(i, i));
    return 2.0 * sum;
  }

  double determinant() const noexcept {
    double prod = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) prod *= chol_(i, i) * chol_(i, i);
    return prod;
  }

  /// Principal submatrix on the given (distinct, in-range) indices, in that order.
  PdMatrix submatrix(std::span<const std::size_t> indices) const {
    const std::size_t k = indices.size();
    SquareMatrix sub(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        if (indices[i] >= dim() || indices[j] >= dim()) throw DomainError("submatrix: index out of range");
        sub(i, j) = entries_(indices[i], indices[j]);
      }
    return from_entries(sub);
  }

 private:
  explicit PdMatrix(SquareMatrix sym) : entries_(std::move(sym)), chol_(entries_.dim()) { factor(); }

  void factor() {
    const std::size_t n = entries_.dim();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, entries_(i, i));
    const double threshold = static_cast<double>(n) * kPivotTolerance * max_diag;
    for (std::size_t j = 0; j < n; ++j) {
      double pivot = entries_(j, j);
      for (std::size_t k = 0; k < j; ++k) pivot -= chol_(j, k) * chol_(j, k);
      if (!(pivot > threshold) || max_diag <= 0.0) throw NotPositiveDefiniteError(j, pivot);
      const double ljj = std::sqrt(pivot);
      chol_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = entries_(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= chol_(i, k) * chol_(j, k);
        chol_(i, j) = s / ljj;
      }
    }
  }

  SquareMatrix entries_;
  SquareMatrix chol_;
};

/// Solves M x = rhs with the cached factor.
inline std::vector<double> cholesky_solve(const PdMatrix& m, std::span<const double> rhs) {
  const std::size_t n = m.dim();
  if (rhs.size() != n) throw DomainError("cholesky_solve: right-hand side has wrong length");
  const SquareMatrix& l = m.chol();
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
    x[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= l(k, i) * x[k];
    x[i] /= l(i, i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Block structure of the joint precision of (w, z_1..z_N) whose marginal in
// z is diag(v^2) + sigma^2 11'.

/// Precision matrix [[a, b], [b', diag(d_diag)]].
struct PrecisionBlocks {
  double a = 0.0;
  std::vector<double> b;
  std::vector<double> d_diag;

  std::size_t dim() const noexcept { return b.size(); }

  double schur_complement() const noexcept {
    double s = a;
    for (std::size_t r = 0; r < b.size(); ++r) s -= b[r] * b[r] / d_diag[r];
    return s;
  }

  void validate() const {
    if (b.empty() || b.size() != d_diag.size()) {
      throw DomainError("PrecisionBlocks: b and d_diag must be nonempty and of equal length");
    }
    for (double d : d_diag) {
      if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("PrecisionBlocks: d_diag entries must be positive");
    }
    for (double x : b) {
      if (!std::isfinite(x)) throw DomainError("PrecisionBlocks: b entries must be finite");
    }
    if (!(schur_complement() > 0.0)) throw DomainError("PrecisionBlocks: Schur complement is not positive");
  }
};

namespace detail {
inline void require_positive_scales(double sigma2, std::span<const double> v) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be positive and finite");
  if (v.empty()) throw DomainError("v must be nonempty");
  for (double vr : v) {
    if (!(vr > 0.0) || !std::isfinite(vr)) throw DomainError("every v_r must be positive and finite");
  }
}
}  // namespace detail

/// A = sum 1/v_r^2 + 1/sigma^2, B = (1/v_r^2)_r, D = diag(1/v_r^2).
inline PrecisionBlocks lemma_precision_blocks(double sigma2, std::span<const double> v) {
  detail::require_positive_scales(sigma2, v);
  PrecisionBlocks blocks;
  blocks.a = 1.0 / sigma2;
  for (double vr : v) {
    const double inv = 1.0 / (vr * vr);
    blocks.a += inv;
    blocks.b.push_back(inv);
    blocks.d_diag.push_back(inv);
  }
  return blocks;
}

inline SquareMatrix assemble_precision(const PrecisionBlocks& blocks) {
  const std::size_t n = blocks.dim();
  SquareMatrix p(n + 1);
  p(0, 0) = blocks.a;
  for (std::size_t r = 0; r < n; ++r) {
    p(0, r + 1) = blocks.b[r];
    p(r + 1, 0) = blocks.b[r];
    p(r + 1, r + 1) = blocks.d_diag[r];
  }
  return p;
}

/// Inverts the block precision with the partitioned-inverse formulas and
/// checks the result against the assembled precision (Frobenius 1e-10).
inline PdMatrix partitioned_inverse_check(const PrecisionBlocks& blocks) {
  blocks.validate();
  const std::size_t n = blocks.dim();
  const double s_inv = 1.0 / blocks.schur_complement();
  std::vector<double> bd(n);
  for (std::size_t r = 0; r < n; ++r) bd[r] = blocks.b[r] / blocks.d_diag[r];

  SquareMatrix cov(n + 1);
  cov(0, 0) = s_inv;
  for (std::size_t r = 0; r < n; ++r) {
    cov(0, r + 1) = -s_inv * bd[r];
    cov(r + 1, 0) = -s_inv * bd[r];
    for (std::size_t c = 0; c < n; ++c) cov(r + 1, c + 1) = s_inv * bd[r] * bd[c];
    cov(r + 1, r + 1) += 1.0 / blocks.d_diag[r];
  }

  const double residual = frobenius_distance(assemble_precision(blocks) * cov, SquareMatrix::identity(n + 1));
  if (residual > 1e-10) {
    throw ConsistencyError("partitioned_inverse_check: precision * covariance deviates from identity by " +
                           std::to_string(residual));
  }
  return PdMatrix::from_entries(cov);
}

/// Joint covariance of (w, z): [[s2, -s2 1'], [-s2 1, diag(v^2) + s2 11']].
inline SquareMatrix full_cov_matrix(double sigma2, std::span<const double> v) {
  detail::require_positive_scales(sigma2, v);
  const std::size_t n = v.size();
  SquareMatrix m(n + 1);
  m(0, 0) = sigma2;
  for (std::size_t r = 0; r < n; ++r) {
    m(0, r + 1) = -sigma2;
    m(r + 1, 0) = -sigma2;
    for (std::size_t c = 0; c < n; ++c) m(r + 1, c + 1) = sigma2;
    m(r + 1, r + 1) += v[r] * v[r];
  }
  return m;
}

/// Determinant of full_cov_matrix via Cholesky, asserted equal to
/// sigma^2 prod v_r^2 within 1e-10 relative.
inline double full_cov_determinant(double sigma2, std::span<const double> v) {
  const double by_cholesky = PdMatrix::from_entries(full_cov_matrix(sigma2, v)).determinant();
  double closed = sigma2;
  for (double vr : v) closed *= vr * vr;
  if (std::abs(by_cholesky - closed) > 1e-10 * std::abs(closed)) {
    throw ConsistencyError("full_cov_determinant: Cholesky " + std::to_string(by_cholesky) +
                           " vs closed form " + std::to_string(closed));
  }
  return by_cholesky;
}

}  // namespace owenext
