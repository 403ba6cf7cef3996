#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schottky/numerics.hpp"

namespace schottky {

template <Scalar S>
using Vector = std::vector<S>;

/// Dense row-major matrix over one scalar backend.
template <Scalar S>
class Matrix {
 public:
  using scalar_type = S;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<S> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      fail(ErrorCode::ShapeMismatch, "entry count does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  Matrix(std::initializer_list<std::initializer_list<S>> rows) : rows_(rows.size()) {
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) fail(ErrorCode::ShapeMismatch, "ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }
  static Matrix scalar(std::size_t n, const S& c) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = c;
    return m;
  }
  static Matrix column(std::span<const S> v) { return Matrix(v.size(), 1, std::vector<S>(v.begin(), v.end())); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const S> entries() const { return data_; }

  Vector<S> col(std::size_t j) const {
    Vector<S> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) fail(ErrorCode::ShapeMismatch, "block out of range");
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) fail(ErrorCode::ShapeMismatch, "block out of range");
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const S& c) {
    for (auto& x : data_) x *= c;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const S& c) { return a *= c; }
  friend Matrix operator*(const S& c, Matrix a) { return a *= c; }
  Matrix operator-() const {
    Matrix m = *this;
    for (auto& x : m.data_) x = -x;
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_)
      fail(ErrorCode::ShapeMismatch, "product of " + a.shape() + " and " + b.shape());
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector<S> operator*(const Matrix& a, std::span<const S> v) {
    if (a.cols_ != v.size()) fail(ErrorCode::ShapeMismatch, "matrix-vector product");
    Vector<S> out(a.rows_, S(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  bool is_zero(const Tolerance& tol = Tolerance{}) const {
    return std::all_of(data_.begin(), data_.end(), [&](const S& x) { return near_zero(x, tol); });
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  template <Scalar T>
  Matrix<T> cast() const {
    std::vector<T> out;
    out.reserve(data_.size());
    for (const auto& x : data_) out.push_back(T(x));
    return Matrix<T>(rows_, cols_, std::move(out));
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorCode::ShapeMismatch, shape() + " vs " + o.shape());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

using ExactMatrix = Matrix<GaussianRational>;
using ApproxMatrix = Matrix<ApproxComplex>;

template <Scalar S>
void require_square(const Matrix<S>& m, const char* what) {
  if (!m.is_square()) fail(ErrorCode::ShapeMismatch, std::string(what) + " needs a square matrix, got " + m.shape());
}

/// Largest entrywise |a - b|; used for residual reporting on either backend.
template <Scalar S>
double max_abs_diff(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::ShapeMismatch, a.shape() + " vs " + b.shape());
  double worst = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) worst = std::max(worst, ScalarTraits<S>::magnitude(ea[k] - eb[k]));
  return worst;
}

template <Scalar S>
bool near_equal(const Matrix<S>& a, const Matrix<S>& b, const Tolerance& tol = Tolerance{}) {
  if constexpr (ScalarTraits<S>::exact)
    return a == b;
  else
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= tol.eps;
}

template <Scalar S>
bool commute(const Matrix<S>& a, const Matrix<S>& b, const Tolerance& tol = Tolerance{}) {
  return near_equal(a * b, b * a, tol);
}

/// (A (x) B)[i*rB + k, j*cB + l] = A[i,j] * B[k,l].
template <Scalar S>
Matrix<S> kron(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const S& aij = a(i, j);
      if (aij.is_zero()) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

template <Scalar S>
Matrix<S> direct_sum(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> out(a.rows() + b.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), a.cols(), b);
  return out;
}

template <Scalar S>
Matrix<S> vstack(std::span<const Matrix<S>> parts, std::size_t cols) {
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) fail(ErrorCode::ShapeMismatch, "vstack column mismatch");
    rows += p.rows();
  }
  Matrix<S> out(rows, cols);
  std::size_t r = 0;
  for (const auto& p : parts) {
    out.set_block(r, 0, p);
    r += p.rows();
  }
  return out;
}

template <Scalar S>
Matrix<S> hstack(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows()) fail(ErrorCode::ShapeMismatch, "hstack row mismatch");
  Matrix<S> out(a.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

template <Scalar S>
Matrix<S> from_columns(std::span<const Vector<S>> cols, std::size_t rows) {
  Matrix<S> out(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) fail(ErrorCode::ShapeMismatch, "column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) out(i, j) = cols[j][i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elimination

template <Scalar S>
struct Echelon {
  Matrix<S> reduced;                // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Gauss-Jordan elimination. The exact backend pivots on the first nonzero
/// entry of each column, which makes every derived basis canonical. The
/// approximate backend takes the largest entry instead.
template <Scalar S>
Echelon<S> rref(Matrix<S> m, const Tolerance& tol = Tolerance{}) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
    std::optional<std::size_t> pick;
    if constexpr (ScalarTraits<S>::exact) {
      for (std::size_t r = row; r < m.rows(); ++r)
        if (!m(r, c).is_zero()) {
          pick = r;
          break;
        }
    } else {
      double best = tol.eps;
      for (std::size_t r = row; r < m.rows(); ++r)
        if (m(r, c).abs() > best) {
          best = m(r, c).abs();
          pick = r;
        }
    }
    if (!pick) {
      if constexpr (!ScalarTraits<S>::exact)
        for (std::size_t r = row; r < m.rows(); ++r) m(r, c) = S(0);
      continue;
    }
    if (*pick != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(*pick, j));
    S inv = S(1) / m(row, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(row, j) *= inv;
    m(row, c) = S(1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, c).is_zero()) continue;
      S f = m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(r, j) -= f * m(row, j);
      m(r, c) = S(0);
    }
    pivots.push_back(c);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

template <Scalar S>
std::size_t rank(const Matrix<S>& m, const Tolerance& tol = Tolerance{}) {
  return rref(m, tol).pivots.size();
}

/// Canonical kernel basis: one vector per free column f, with a 1 in slot f,
/// zeros in the other free slots and the pivot slots solved for.
template <Scalar S>
std::vector<Vector<S>> kernel_basis(const Matrix<S>& m, const Tolerance& tol = Tolerance{}) {
  auto ech = rref(m, tol);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  std::vector<Vector<S>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    Vector<S> v(m.cols(), S(0));
    v[f] = S(1);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) v[ech.pivots[r]] = -ech.reduced(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Canonical basis of the row space: the nonzero rows of the reduced form.
template <Scalar S>
std::vector<Vector<S>> row_space_basis(const Matrix<S>& m, const Tolerance& tol = Tolerance{}) {
  auto ech = rref(m, tol);
  std::vector<Vector<S>> basis;
  for (std::size_t r = 0; r < ech.pivots.size(); ++r) {
    Vector<S> v(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) v[j] = ech.reduced(r, j);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Canonical basis of the column space (reduced column echelon form).
template <Scalar S>
std::vector<Vector<S>> column_space_basis(const Matrix<S>& m, const Tolerance& tol = Tolerance{}) {
  return row_space_basis(m.transpose(), tol);
}

/// Some x with m x = b, or nullopt if the system is inconsistent. Free
/// variables are set to zero.
template <Scalar S>
std::optional<Vector<S>> solve(const Matrix<S>& m, std::span<const S> b, const Tolerance& tol = Tolerance{}) {
  if (b.size() != m.rows()) fail(ErrorCode::ShapeMismatch, "right-hand side length " + std::to_string(b.size()) + " vs " + m.shape());
  auto ech = rref(hstack(m, Matrix<S>::column(b)), tol);
  if (!ech.pivots.empty() && ech.pivots.back() == m.cols()) return std::nullopt;
  Vector<S> x(m.cols(), S(0));
  for (std::size_t r = 0; r < ech.pivots.size(); ++r) x[ech.pivots[r]] = ech.reduced(r, m.cols());
  return x;
}

template <Scalar S>
std::optional<Matrix<S>> inverse(const Matrix<S>& m, const Tolerance& tol = Tolerance{}) {
  require_square(m, "inverse");
  const std::size_t n = m.rows();
  auto ech = rref(hstack(m, Matrix<S>::identity(n)), tol);
  if (ech.pivots.size() < n || (n > 0 && ech.pivots[n - 1] != n - 1)) return std::nullopt;
  return ech.reduced.block(0, n, n, n);
}

template <Scalar S>
Matrix<S> inverse_or_throw(const Matrix<S>& m, const Tolerance& tol = Tolerance{}) {
  auto inv = inverse(m, tol);
  if (!inv) fail(ErrorCode::NotInvertible, "matrix of shape " + m.shape() + " is singular");
  return std::move(*inv);
}

template <Scalar S>
Matrix<S> power(Matrix<S> base, long exponent, const Tolerance& tol = Tolerance{}) {
  require_square(base, "power");
  if (exponent < 0) {
    base = inverse_or_throw(base, tol);
    exponent = -exponent;
  }
  Matrix<S> result = Matrix<S>::identity(base.rows());
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

template <Scalar S>
bool is_scalar_matrix(const Matrix<S>& m, const Tolerance& tol = Tolerance{}) {
  require_square(m, "scalar test");
  if (m.rows() == 0) return true;
  return near_equal(m, Matrix<S>::scalar(m.rows(), m(0, 0)), tol);
}

// ---------------------------------------------------------------------------
// Nilpotent / unipotent series

/// Smallest n >= 0 with N^n = 0. Nilpotency is decided first by squaring
/// ceil(log2 r) times: N is nilpotent iff N^(2^k) = 0 for any 2^k >= r.
template <Scalar S>
std::size_t nilpotency_index(const Matrix<S>& n, const Tolerance& tol = Tolerance{}) {
  require_square(n, "nilpotency_index");
  const std::size_t r = n.rows();
  if (r == 0) return 0;
  Matrix<S> probe = n;
  for (std::size_t reach = 1; reach < r; reach *= 2) probe = probe * probe;
  if (!probe.is_zero(tol))
    throw WitnessError<Matrix<S>>(ErrorCode::NotNilpotent, "a high power of the matrix is nonzero", probe);
  Matrix<S> p = n;
  std::size_t index = 1;
  while (!p.is_zero(tol)) {
    p = p * n;
    ++index;
  }
  return index;
}

template <Scalar S>
bool is_nilpotent(const Matrix<S>& n, const Tolerance& tol = Tolerance{}) {
  try {
    nilpotency_index(n, tol);
    return true;
  } catch (const WitnessError<Matrix<S>>&) {
    return false;
  }
}

/// exp(N) = sum_{k<r} N^k / k!, exact for nilpotent N.
template <Scalar S>
Matrix<S> exp_nilpotent(const Matrix<S>& n, const Tolerance& tol = Tolerance{}) {
  const std::size_t index = nilpotency_index(n, tol);
  const std::size_t r = n.rows();
  Matrix<S> sum = Matrix<S>::identity(r);
  Matrix<S> term = Matrix<S>::identity(r);
  for (std::size_t k = 1; k < index; ++k) {
    term = term * n;
    term *= S(1) / S(static_cast<long>(k));
    sum += term;
  }
  return sum;
}

/// log(U) = sum_{k=1}^{r-1} (-1)^(k+1) (U - I)^k / k for unipotent U.
template <Scalar S>
Matrix<S> log_unipotent(const Matrix<S>& u, const Tolerance& tol = Tolerance{}) {
  require_square(u, "log_unipotent");
  const std::size_t r = u.rows();
  const Matrix<S> n = u - Matrix<S>::identity(r);
  std::size_t index = 0;
  try {
    index = nilpotency_index(n, tol);
  } catch (const WitnessError<Matrix<S>>& e) {
    throw WitnessError<Matrix<S>>(ErrorCode::NotUnipotent, "U - I is not nilpotent", e.witness());
  }
  Matrix<S> sum(r, r);
  Matrix<S> p = Matrix<S>::identity(r);
  for (std::size_t k = 1; k < index; ++k) {
    p = p * n;
    S coeff = S(1) / S(static_cast<long>(k));
    if (k % 2 == 0) coeff = -coeff;
    sum += p * coeff;
  }
  return sum;
}

/// General matrix exponential on the approximate backend (scaling and
/// squaring with a Taylor kernel). Used only to check gauges whose
/// coefficients are not nilpotent.
inline ApproxMatrix expm(const ApproxMatrix& a) {
  require_square(a, "expm");
  const std::size_t r = a.rows();
  double norm = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < r; ++j) row += a(i, j).abs();
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  ApproxMatrix scaled = a * ApproxComplex(std::ldexp(1.0, -squarings));
  ApproxMatrix sum = ApproxMatrix::identity(r);
  ApproxMatrix term = ApproxMatrix::identity(r);
  for (int k = 1; k <= 20; ++k) {
    term = term * scaled;
    term *= ApproxComplex(1.0 / k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace schottky
