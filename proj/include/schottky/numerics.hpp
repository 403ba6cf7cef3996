#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

#include <gmpxx.h>

#include "schottky/errors.hpp"

namespace schottky {

/// Absolute tolerance used by the approximate backend.
struct Tolerance {
  double eps = 1e-9;

  explicit Tolerance(double e = 1e-9) : eps(e) {
    if (!(e > 0.0) || !std::isfinite(e))
      fail(ErrorCode::Domain, "tolerance must be a positive finite number");
  }
};

/// An exact element re + im*i of Q(i). Both parts are kept in lowest terms
/// with positive denominators (GMP canonicalizes after every operation), so
/// == is structural.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long re) : re_(re), im_(0) {}  // NOLINT: implicit from int
  GaussianRational(mpq_class re, mpq_class im = 0)
      : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static GaussianRational from_fractions(long p, long q, long r = 0, long s = 1) {
    if (q == 0 || s == 0) fail(ErrorCode::DivisionByZero, "zero denominator");
    mpq_class re{mpz_class(p), mpz_class(q)};
    mpq_class im{mpz_class(r), mpz_class(s)};
    return {re, im};
  }
  static GaussianRational i() { return {0, 1}; }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }

  GaussianRational inv() const {
    if (is_zero()) fail(ErrorCode::DivisionByZero, "inverse of exact zero");
    mpq_class n = norm();
    return {re_ / n, -im_ / n};
  }

  GaussianRational operator-() const { return {-re_, -im_}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) { return *this *= o.inv(); }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Largest absolute value among the numerators and denominators of both parts.
  mpz_class height() const {
    mpz_class h = abs(re_.get_num());
    auto bump = [&h](const mpz_class& z) {
      mpz_class a = abs(z);
      if (a > h) h = a;
    };
    bump(re_.get_den());
    bump(im_.get_num());
    bump(im_.get_den());
    return h;
  }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// A finite double-precision complex number.
class ApproxComplex {
 public:
  ApproxComplex() = default;
  ApproxComplex(double re, double im = 0.0) : value_(re, im) { check(); }  // NOLINT
  explicit ApproxComplex(std::complex<double> z) : value_(z) { check(); }
  explicit ApproxComplex(const GaussianRational& q) : ApproxComplex(q.to_complex()) {}

  double re() const { return value_.real(); }
  double im() const { return value_.imag(); }
  double abs() const { return std::abs(value_); }
  const std::complex<double>& value() const { return value_; }

  ApproxComplex inv(Tolerance tol = Tolerance{}) const {
    if (abs() < tol.eps) fail(ErrorCode::DivisionByZero, "inverse of a value below eps");
    return ApproxComplex(1.0 / value_);
  }

  ApproxComplex operator-() const { return ApproxComplex(-value_); }
  ApproxComplex& operator+=(const ApproxComplex& o) { value_ += o.value_; check(); return *this; }
  ApproxComplex& operator-=(const ApproxComplex& o) { value_ -= o.value_; check(); return *this; }
  ApproxComplex& operator*=(const ApproxComplex& o) { value_ *= o.value_; check(); return *this; }
  ApproxComplex& operator/=(const ApproxComplex& o) {
    if (o.abs() < Tolerance{}.eps) fail(ErrorCode::DivisionByZero, "divisor below eps");
    value_ /= o.value_;
    check();
    return *this;
  }

  friend ApproxComplex operator+(ApproxComplex a, const ApproxComplex& b) { return a += b; }
  friend ApproxComplex operator-(ApproxComplex a, const ApproxComplex& b) { return a -= b; }
  friend ApproxComplex operator*(ApproxComplex a, const ApproxComplex& b) { return a *= b; }
  friend ApproxComplex operator/(ApproxComplex a, const ApproxComplex& b) { return a /= b; }
  friend bool operator==(const ApproxComplex& a, const ApproxComplex& b) { return a.value_ == b.value_; }

  bool is_zero() const { return value_ == std::complex<double>{}; }

 private:
  void check() const {
    if (!std::isfinite(value_.real()) || !std::isfinite(value_.imag()))
      fail(ErrorCode::Domain, "non-finite approximate result");
  }

  std::complex<double> value_{};
};

// Backend dispatch. `exact` selects between decidable equality and
// tolerance-based comparison in the generic algorithms.
template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<GaussianRational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static bool is_zero(const GaussianRational& x, const Tolerance&) { return x.is_zero(); }
  static double magnitude(const GaussianRational& x) { return std::abs(x.to_complex()); }
};

template <>
struct ScalarTraits<ApproxComplex> {
  static constexpr bool exact = false;
  static constexpr const char* name = "approx";
  static bool is_zero(const ApproxComplex& x, const Tolerance& tol) { return x.abs() <= tol.eps; }
  static double magnitude(const ApproxComplex& x) { return x.abs(); }
};

template <typename S>
concept Scalar = requires { ScalarTraits<S>::exact; };

template <Scalar S>
bool near_zero(const S& x, const Tolerance& tol = Tolerance{}) {
  return ScalarTraits<S>::is_zero(x, tol);
}

/// Principal complex logarithm; the imaginary part lies in (-pi, pi].
inline ApproxComplex principal_log(const ApproxComplex& c, Tolerance tol = Tolerance{}) {
  if (c.abs() <= tol.eps) fail(ErrorCode::Domain, "logarithm of zero");
  double arg = std::atan2(c.im(), c.re());
  // atan2 returns -pi for (negative, -0.0); the principal branch wants +pi.
  if (arg <= -std::numbers::pi) arg = std::numbers::pi;
  return ApproxComplex(std::log(c.abs()), arg);
}

inline ApproxComplex complex_exp(const ApproxComplex& c) { return ApproxComplex(std::exp(c.value())); }

// ---------------------------------------------------------------------------
// Text encoding: "p/q", "p/q+r/s*i", "r/s*i" (denominator 1 is printed as a
// bare integer). The approximate backend uses the same layout with decimal
// floats printed in shortest round-trip form.

namespace detail {

struct ComplexParts {
  std::string re;
  std::string im;
  bool has_im = false;
};

inline ComplexParts split_complex(std::string_view s, bool float_syntax) {
  if (s.empty()) fail(ErrorCode::Parse, "empty scalar");
  ComplexParts parts;
  if (s.back() != 'i') {
    parts.re = std::string(s);
    return parts;
  }
  std::string_view body = s.substr(0, s.size() - 1);
  if (!body.empty() && body.back() == '*') body.remove_suffix(1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if (body[k] != '+' && body[k] != '-') continue;
    if (float_syntax && (body[k - 1] == 'e' || body[k - 1] == 'E')) continue;
    split = k;
    break;
  }
  std::string_view re = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
  std::string_view im = split == std::string_view::npos ? body : body.substr(split);
  parts.re = std::string(re);
  parts.im = std::string(im);
  if (parts.im.empty() || parts.im == "+" || parts.im == "-") parts.im += "1";
  if (parts.im.front() == '+') parts.im.erase(0, 1);
  parts.has_im = true;
  if (split != std::string_view::npos && parts.re.empty()) fail(ErrorCode::Parse, "malformed scalar '" + std::string(s) + "'");
  return parts;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline mpq_class parse_rational(std::string_view s, std::string_view whole) {
  auto bad = [&] { fail(ErrorCode::Parse, "malformed rational '" + std::string(whole) + "'"); };
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) bad();
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) fail(ErrorCode::Parse, "zero denominator in '" + std::string(whole) + "'");
  mpq_class q(negative ? mpz_class(-n) : n, d);
  q.canonicalize();
  return q;
}

inline double parse_double(std::string_view s, std::string_view whole) {
  std::string tmp(s);
  if (!tmp.empty() && tmp.front() == '+') tmp.erase(0, 1);
  if (tmp.empty()) fail(ErrorCode::Parse, "malformed float '" + std::string(whole) + "'");
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v))
    fail(ErrorCode::Parse, "malformed float '" + std::string(whole) + "'");
  return v;
}

inline std::string format_rational(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) fail(ErrorCode::Parse, "empty scalar");
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace detail

inline GaussianRational parse_gaussian(std::string_view s) {
  s = detail::trim(s);
  auto parts = detail::split_complex(s, false);
  mpq_class re = parts.re.empty() ? mpq_class(0) : detail::parse_rational(parts.re, s);
  mpq_class im = parts.has_im ? detail::parse_rational(parts.im, s) : mpq_class(0);
  return {re, im};
}

inline std::string to_string(const GaussianRational& x) {
  bool has_re = sgn(x.re()) != 0;
  bool has_im = sgn(x.im()) != 0;
  if (!has_im) return detail::format_rational(x.re());
  std::string im = detail::format_rational(x.im()) + "*i";
  if (!has_re) return im;
  return detail::format_rational(x.re()) + (sgn(x.im()) > 0 ? "+" : "") + im;
}

inline ApproxComplex parse_approx(std::string_view s) {
  s = detail::trim(s);
  auto parts = detail::split_complex(s, true);
  double re = parts.re.empty() ? 0.0 : detail::parse_double(parts.re, s);
  double im = parts.has_im ? detail::parse_double(parts.im, s) : 0.0;
  return {re, im};
}

inline std::string to_string(const ApproxComplex& x) {
  if (x.im() == 0.0 && !std::signbit(x.im())) return detail::format_double(x.re());
  std::string im = detail::format_double(x.im());
  return detail::format_double(x.re()) + (im.front() == '-' ? "" : "+") + im + "*i";
}

template <Scalar S>
S parse_scalar(std::string_view s) {
  if constexpr (ScalarTraits<S>::exact)
    return parse_gaussian(s);
  else
    return parse_approx(s);
}

inline std::ostream& operator<<(std::ostream& os, const GaussianRational& x) { return os << to_string(x); }
inline std::ostream& operator<<(std::ostream& os, const ApproxComplex& x) { return os << to_string(x); }

}  // namespace schottky
