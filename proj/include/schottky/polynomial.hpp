#pragma once

#include <utility>
#include <vector>

#include "schottky/matrix.hpp"

namespace schottky {

/// Univariate polynomial over an exact field; coefficients low degree first,
/// no trailing zeros (the zero polynomial has no coefficients).
template <Scalar S>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<S> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Polynomial monomial(std::size_t degree, const S& c = S(1)) {
    std::vector<S> v(degree + 1, S(0));
    v[degree] = c;
    return Polynomial(std::move(v));
  }

  bool is_zero() const { return coeffs_.empty(); }
  // degree of the zero polynomial is reported as -1
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<S>& coeffs() const { return coeffs_; }
  const S& lead() const { return coeffs_.back(); }

  S coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : S(0); }

  Polynomial derivative() const {
    std::vector<S> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * S(static_cast<long>(k)));
    return Polynomial(std::move(d));
  }

  Polynomial monic() const {
    if (is_zero()) return *this;
    S inv = S(1) / lead();
    std::vector<S> v = coeffs_;
    for (auto& c : v) c *= inv;
    return Polynomial(std::move(v));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<S> v(std::max(a.coeffs_.size(), b.coeffs_.size()), S(0));
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.coeff(k) + b.coeff(k);
    return Polynomial(std::move(v));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<S> v(std::max(a.coeffs_.size(), b.coeffs_.size()), S(0));
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.coeff(k) - b.coeff(k);
    return Polynomial(std::move(v));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<S> v(a.coeffs_.size() + b.coeffs_.size() - 1, S(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(v));
  }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Quotient and remainder of long division by a nonzero divisor.
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) fail(ErrorCode::DivisionByZero, "polynomial division by zero");
    std::vector<S> rem = a.coeffs_;
    if (a.degree() < b.degree()) return {Polynomial{}, a};
    std::vector<S> quot(a.coeffs_.size() - b.coeffs_.size() + 1, S(0));
    S inv_lead = S(1) / b.lead();
    for (std::size_t k = quot.size(); k-- > 0;) {
      S q = rem[k + b.coeffs_.size() - 1] * inv_lead;
      quot[k] = q;
      if (q.is_zero()) continue;
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) rem[k + j] -= q * b.coeffs_[j];
    }
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
  }

  /// Horner evaluation at a square matrix.
  Matrix<S> operator()(const Matrix<S>& m) const {
    require_square(m, "polynomial evaluation");
    Matrix<S> acc(m.rows(), m.rows());
    const auto id = Matrix<S>::identity(m.rows());
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * m + id * coeffs_[k];
    return acc;
  }

  S operator()(const S& x) const {
    S acc(0);
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * x + coeffs_[k];
    return acc;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  }

  std::vector<S> coeffs_;
};

/// Monic greatest common divisor.
template <Scalar S>
Polynomial<S> gcd(Polynomial<S> a, Polynomial<S> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// det(xI - M) via Faddeev-LeVerrier (characteristic zero).
template <Scalar S>
Polynomial<S> characteristic_polynomial(const Matrix<S>& m) {
  require_square(m, "characteristic polynomial");
  const std::size_t n = m.rows();
  std::vector<S> c(n + 1, S(0));
  c[n] = S(1);
  Matrix<S> aux(n, n);
  const auto id = Matrix<S>::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    aux = m * aux + id * c[n - k + 1];
    Matrix<S> prod = m * aux;
    S trace(0);
    for (std::size_t i = 0; i < n; ++i) trace += prod(i, i);
    c[n - k] = -trace / S(static_cast<long>(k));
  }
  return Polynomial<S>(std::move(c));
}

/// f / gcd(f, f'): same roots as f, each with multiplicity one.
template <Scalar S>
Polynomial<S> squarefree_part(const Polynomial<S>& f) {
  if (f.degree() <= 0) return f.monic();
  return divmod(f, gcd(f, f.derivative())).first.monic();
}

}  // namespace schottky
