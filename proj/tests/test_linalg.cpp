#include <catch_amalgamated.hpp>

#include "generators.hpp"

using namespace schottky;
using Q = GaussianRational;
using M = ExactMatrix;

namespace {
const Q i = Q::i();
}

TEST_CASE("rank, kernel, inverse", "[linalg]") {
  auto ker = kernel_basis(M{{0, 1}, {0, 0}});
  REQUIRE(ker.size() == 1);
  CHECK(ker[0] == Vector<Q>{1, 0});
  CHECK(rank(M::identity(3)) == 3);
  CHECK(inverse(M{{i, 0}, {0, 1}}) == M{{-i, 0}, {0, 1}});
  CHECK_FALSE(inverse(M{{1, 2}, {2, 4}}).has_value());
  CHECK(rank(M(0, 0)) == 0);

  auto x = solve(M{{1, 1}, {0, 2}}, std::span<const Q>(Vector<Q>{3, 4}));
  REQUIRE(x);
  CHECK(*x == Vector<Q>{1, 2});
  CHECK_FALSE(solve(M{{1, 1}, {1, 1}}, std::span<const Q>(Vector<Q>{0, 1})).has_value());
}

TEST_CASE("kron and direct sum", "[linalg]") {
  CHECK(kron(M::identity(2), M::identity(2)) == M::identity(4));
  CHECK(direct_sum(M{{2}}, M{{3}}) == M{{2, 0}, {0, 3}});
  M expected(4, 4);
  expected(0, 2) = 1;
  expected(1, 3) = 1;
  CHECK(kron(M{{0, 1}, {0, 0}}, M::identity(2)) == expected);
}

TEST_CASE("nilpotency index", "[linalg]") {
  CHECK(nilpotency_index(M(3, 3)) == 1);
  CHECK(nilpotency_index(M{{0, 1}, {0, 0}}) == 2);
  CHECK(nilpotency_index(M{{0, 2}, {0, 0}}) == 2);
  CHECK(nilpotency_index(M{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}) == 3);
  try {
    nilpotency_index(M{{1, 1}, {0, 0}});
    FAIL("expected NotNilpotent");
  } catch (const WitnessError<M>& e) {
    CHECK(e.code() == ErrorCode::NotNilpotent);
    CHECK_FALSE(e.witness().is_zero());
  }
}

TEST_CASE("nilpotent exponential and unipotent logarithm", "[linalg]") {
  CHECK(exp_nilpotent(M{{0, 1}, {0, 0}}) == M{{1, 1}, {0, 1}});
  CHECK(log_unipotent(M{{1, 1}, {0, 1}}) == M{{0, 1}, {0, 0}});
  CHECK(exp_nilpotent(M{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}) ==
        M{{1, 1, Q::from_fractions(1, 2)}, {0, 1, 1}, {0, 0, 1}});
  CHECK(log_unipotent(M::identity(3)) == M(3, 3));
  CHECK_THROWS_AS(log_unipotent(M{{2, 0}, {0, 1}}), Error);
}

TEST_CASE("exp and log are mutually inverse", "[linalg][property]") {
  gen::Source src(21);
  for (int n = 0; n < 200; ++n) {
    std::size_t r = src.index(1, 6);
    M p = src.unimodular(r);
    M p_inv = inverse_or_throw(p);
    M u = p_inv * src.unitriangular(r, 3) * p;
    REQUIRE(exp_nilpotent(log_unipotent(u)) == u);
    M nil = p_inv * src.strictly_upper(r, 3) * p;
    REQUIRE(log_unipotent(exp_nilpotent(nil)) == nil);
  }
}

TEST_CASE("exp is additive on commuting nilpotents", "[linalg][property]") {
  gen::Source src(22);
  for (int n = 0; n < 100; ++n) {
    std::size_t r = src.index(1, 5);
    M nil = src.strictly_upper(r, 2);
    // two polynomials in the same nilpotent commute
    M a = Q(src.integer(-3, 3)) * nil + Q(src.integer(-3, 3)) * nil * nil;
    M b = src.scalar(5) * nil * nil + src.scalar(5) * nil;
    REQUIRE(a * b == b * a);
    REQUIRE(exp_nilpotent(a + b) == exp_nilpotent(a) * exp_nilpotent(b));
  }
}

TEST_CASE("kernel basis is canonical", "[linalg][property]") {
  gen::Source src(23);
  for (int n = 0; n < 100; ++n) {
    M m = src.matrix(src.index(1, 4), src.index(1, 5), 3);
    // knock out a row combination now and then to get nontrivial kernels
    if (m.rows() > 1 && src.coin()) m.set_block(1, 0, m.block(0, 0, 1, m.cols()) * Q(2));
    auto k1 = kernel_basis(m);
    auto k2 = kernel_basis(M(m));
    REQUIRE(k1 == k2);
    REQUIRE(k1.size() + rank(m) == m.cols());
    for (const auto& v : k1) REQUIRE(std::ranges::all_of(m * std::span<const Q>(v), [](const Q& x) { return x.is_zero(); }));
  }
}

TEST_CASE("rank is multiplicative under kron", "[linalg][property]") {
  gen::Source src(24);
  for (int n = 0; n < 100; ++n) {
    std::size_t ra = src.index(2, 3), rb = src.index(2, 3);
    M a = src.matrix(ra, ra, 2);
    M b = src.matrix(rb, rb, 2);
    if (src.coin()) a.set_block(0, 0, M(1, ra));
    REQUIRE(rank(kron(a, b)) == rank(a) * rank(b));
  }
}

TEST_CASE("approximate backend linear algebra", "[linalg]") {
  ApproxMatrix a{{ApproxComplex(0, 1), 0}, {0, 1}};
  auto inv = inverse(a);
  REQUIRE(inv);
  CHECK(near_equal(*inv, ApproxMatrix{{ApproxComplex(0, -1), 0}, {0, 1}}));
  ApproxMatrix n{{0, 1}, {0, 0}};
  CHECK(near_equal(expm(n), ApproxMatrix{{1, 1}, {0, 1}}));
  ApproxMatrix d{{ApproxComplex(0, M_PI), 0}, {0, 0}};
  CHECK(near_equal(expm(d), ApproxMatrix{{-1, 0}, {0, 1}}, Tolerance(1e-12)));
}
