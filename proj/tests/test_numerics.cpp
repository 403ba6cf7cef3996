#include <catch_amalgamated.hpp>

#include "generators.hpp"

using namespace schottky;
using Q = GaussianRational;

TEST_CASE("gaussian rational field operations", "[numerics]") {
  Q half_plus_i = Q::from_fractions(1, 2, 1, 1);
  Q half_minus_i = Q::from_fractions(1, 2, -1, 1);
  CHECK(half_plus_i * half_minus_i == Q::from_fractions(5, 4));
  CHECK(Q::i().inv() == -Q::i());
  CHECK(Q::from_fractions(2, 3) + Q::from_fractions(1, 3) == Q(1));
  CHECK(Q::from_fractions(2, 4).re() == mpq_class(1, 2));
  CHECK_THROWS_MATCHES(Q(0).inv(), Error, Catch::Matchers::Predicate<const Error&>([](const Error& e) {
                         return e.code() == ErrorCode::DivisionByZero;
                       }));
}

TEST_CASE("every nonzero exact scalar has an exact inverse", "[numerics][property]") {
  gen::Source src(11);
  for (int n = 0; n < 1000; ++n) {
    Q a = src.nonzero(50);
    REQUIRE(a * a.inv() == Q(1));
    REQUIRE(a / a == Q(1));
  }
}

TEST_CASE("principal logarithm", "[numerics]") {
  Tolerance tol;
  CHECK(principal_log(ApproxComplex(1.0)).abs() == 0.0);
  ApproxComplex minus_one = principal_log(ApproxComplex(-1.0));
  CHECK(minus_one.re() == Catch::Approx(0.0).margin(1e-15));
  CHECK(minus_one.im() == Catch::Approx(M_PI));
  // -1 with a signed-zero imaginary part still lands on +i*pi
  CHECK(principal_log(ApproxComplex(std::complex<double>(-1.0, -0.0))).im() == Catch::Approx(M_PI));

  ApproxComplex two_i(0.0, 2.0);
  ApproxComplex l = principal_log(two_i);
  CHECK(l.re() == Catch::Approx(std::log(2.0)));
  CHECK(l.im() == Catch::Approx(M_PI / 2));
  CHECK((complex_exp(l) - two_i).abs() <= tol.eps);

  CHECK_THROWS_AS(principal_log(ApproxComplex(0.0)), Error);
}

TEST_CASE("exp inverts the principal logarithm on random inputs", "[numerics][property]") {
  gen::Source src(12);
  Tolerance tol;
  for (int n = 0; n < 1000; ++n) {
    ApproxComplex c = src.approx_modulus(1e-3, 1e3);
    ApproxComplex back = complex_exp(principal_log(c, tol));
    // relative: 10*eps scaled by |c|
    REQUIRE((back - c).abs() <= 10 * tol.eps * std::max(1.0, c.abs()));
    REQUIRE(principal_log(c).im() > -M_PI);
    REQUIRE(principal_log(c).im() <= M_PI);
  }
}

TEST_CASE("approximate backend rejects non-finite values", "[numerics]") {
  CHECK_THROWS_AS(ApproxComplex(std::nan("")), Error);
  CHECK_THROWS_AS(ApproxComplex(1.0) / ApproxComplex(0.0), Error);
  CHECK_THROWS_AS(Tolerance(0.0), Error);
}

TEST_CASE("scalar text round trip", "[numerics]") {
  CHECK(to_string(Q::from_fractions(1, 2, -3, 4)) == "1/2-3/4*i");
  CHECK(to_string(Q(3)) == "3");
  CHECK(to_string(Q::i() * Q(3)) == "3*i");
  CHECK(parse_gaussian("i") == Q::i());
  CHECK(parse_gaussian("-i") == -Q::i());
  CHECK(parse_gaussian("1/2+i") == Q::from_fractions(1, 2, 1, 1));
  CHECK(parse_gaussian(" 4/6 ") == Q::from_fractions(2, 3));
  CHECK_THROWS_AS(parse_gaussian("1/0"), Error);
  CHECK_THROWS_AS(parse_gaussian("abc"), Error);
  CHECK_THROWS_AS(parse_gaussian("1.5"), Error);
  CHECK(parse_approx("1e-3-2.5*i") == ApproxComplex(1e-3, -2.5));

  gen::Source src(13);
  for (int n = 0; n < 500; ++n) {
    Q a = src.scalar(1000);
    REQUIRE(parse_gaussian(to_string(a)) == a);
    ApproxComplex z(src.real(-1e6, 1e6), src.real(-1e-6, 1e-6));
    REQUIRE(parse_approx(to_string(z)) == z);
  }
}
