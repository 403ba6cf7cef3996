#include <catch_amalgamated.hpp>

#include "generators.hpp"

using namespace schottky;
using Q = GaussianRational;
using M = ExactMatrix;
using A = ApproxMatrix;

namespace {

const Q i = Q::i();
const M J{{1, 1}, {0, 1}};

TorusData<Q> torus_i() { return make_torus(M{{i}}); }

ExactRep worked_rho(const TorusData<Q>& t) { return ExactRep{t.lattice, 2, {J, J}}; }

}  // namespace

TEST_CASE("worked example", "[schottky]") {
  auto t = torus_i();
  auto res = schottkyize_unipotent(t, worked_rho(t));
  REQUIRE(res.gauge.coefficients.size() == 1);
  CHECK(res.gauge.coefficients[0] == M{{0, -1}, {0, 0}});
  CHECK(res.sigma.group == GroupSpec::free_abelian(1));
  CHECK(res.sigma.images[0] == M{{1, 1 - i}, {0, 1}});
  auto report = verify_gauge(t, worked_rho(t), res.sigma, res.gauge);
  CHECK(report.ok);
  CHECK(report.max_residual == 0.0);
}

TEST_CASE("trivial and already-Schottky inputs", "[schottky]") {
  auto t = make_torus(M{{i, 1}, {1, 2}});
  auto triv = schottkyize_unipotent(t, ExactRep::trivial(t.lattice, 3));
  CHECK(triv.sigma == ExactRep::trivial(GroupSpec::free_abelian(2), 3));
  for (const auto& a : triv.gauge.coefficients) CHECK(a.is_zero());
  CHECK(verify_gauge(t, ExactRep::trivial(t.lattice, 3), triv.sigma, triv.gauge).ok);

  ExactRep tau{GroupSpec::free_abelian(2), 2, {J, M{{1, 3}, {0, 1}}}};
  auto res = schottkyize_unipotent(t, pullback(tau, t.alpha));
  CHECK(res.sigma == tau);
  for (const auto& a : res.gauge.coefficients) CHECK(a.is_zero());
}

TEST_CASE("tampered gauge is rejected at the exponential identity", "[schottky]") {
  auto t = torus_i();
  auto rho = worked_rho(t);
  auto res = schottkyize_unipotent(t, rho);
  auto tampered = res.gauge;
  tampered.coefficients[0](0, 1) += 1;
  auto report = verify_gauge(t, rho, res.sigma, tampered);
  CHECK_FALSE(report.ok);
  CHECK(report.failed_check == "exp-identity");
  REQUIRE(report.index);
  CHECK(*report.index == 0);
  REQUIRE(report.residual);
  CHECK_FALSE(report.residual->is_zero());

  auto wrong_sigma = res.sigma;
  wrong_sigma.images[0] = J;
  CHECK(verify_gauge(t, rho, wrong_sigma, res.gauge).failed_check == "generator-identity");
}

TEST_CASE("non-unipotent and mismatched inputs", "[schottky]") {
  auto t = torus_i();
  CHECK_THROWS_AS(schottkyize_unipotent(t, ExactRep{t.lattice, 1, {M{{2}}, M{{1}}}}), Error);
  CHECK_THROWS_AS(schottkyize_unipotent(t, ExactRep::trivial(GroupSpec::lattice_unbound(2), 1)), Error);
  CHECK_THROWS_AS(make_torus(M{{1, 2}, {3, 4}}), Error);
}

TEST_CASE("Schottky gauge on random unipotent lattice reps", "[schottky][property]") {
  gen::Source src(61);
  for (int n = 0; n < 40; ++n) {
    std::size_t g = src.index(1, 3);
    auto t = make_torus(src.symmetric_invertible(g));
    ExactRep rho = src.unipotent_rep(t.lattice, src.index(1, 4));
    auto res = schottkyize_unipotent(t, rho);
    REQUIRE(verify_gauge(t, rho, res.sigma, res.gauge).ok);
    for (std::size_t j = 0; j < g; ++j)
      REQUIRE(exp_nilpotent(res.gauge.coefficients[j]) * rho.images[g + j] == M::identity(rho.rank));
  }
}

TEST_CASE("characters", "[schottky]") {
  auto t = torus_i().cast<ApproxComplex>();
  Tolerance tol;

  auto triv = schottkyize_character(t, ApproxRep::trivial(t.lattice, 1));
  CHECK(triv.gauge.coefficients[0](0, 0).abs() == 0.0);
  CHECK(near_equal(triv.sigma.images[0], A{{1}}));

  ApproxComplex c(0.3, -1.7);
  ApproxRep chi{t.lattice, 1, {A{{c}}, A{{-1}}}};
  auto res = schottkyize_character(t, chi);
  ApproxComplex a = res.gauge.coefficients[0](0, 0);
  CHECK(std::abs(a.re()) <= tol.eps);
  CHECK(a.im() == Catch::Approx(-M_PI));
  ApproxComplex expected = ApproxComplex(std::exp(M_PI)) * c;
  CHECK((res.sigma.images[0](0, 0) - expected).abs() <= tol.eps * expected.abs());
  CHECK(verify_gauge(t, chi, res.sigma, res.gauge, Tolerance(1e-6)).ok);

  ApproxRep schottky{t.lattice, 1, {A{{c}}, A{{1}}}};
  CHECK((schottkyize_character(t, schottky).sigma.images[0](0, 0) - c).abs() <= tol.eps);

  CHECK_THROWS_AS(schottkyize_character(t, ApproxRep{t.lattice, 1, {A{{c}}, A{{0}}}}), Error);
}

TEST_CASE("flat sums", "[schottky]") {
  auto t = torus_i();
  auto ta = t.cast<ApproxComplex>();
  auto single = schottkyize_flat_sum(t, {{ApproxRep::trivial(ta.lattice, 1), ExactRep::trivial(t.lattice, 1)}});
  CHECK(near_equal(single.sigma.images[0], A{{1}}));

  auto worked = schottkyize_flat_sum(t, {{ApproxRep::trivial(ta.lattice, 1), worked_rho(t)}});
  CHECK(near_equal(worked.sigma.images[0], A{{1, ApproxComplex(1, -1)}, {0, 1}}));

  ApproxRep chi{ta.lattice, 1, {A{{ApproxComplex(2, 1)}}, A{{ApproxComplex(0, 3)}}}};
  auto two = schottkyize_flat_sum(t, {{chi, worked_rho(t)}, {ApproxRep::trivial(ta.lattice, 1), ExactRep::trivial(t.lattice, 1)}});
  CHECK(two.sigma.rank == 3);
  CHECK(two.sigma.images[0](2, 0).abs() == 0.0);
  CHECK(two.sigma.images[0](0, 2).abs() == 0.0);
  CHECK(near_equal(two.sigma.images[0].block(2, 2, 1, 1), A{{1}}));
  for (double r : two.kernel_residuals) CHECK(r <= 1e-9);
  CHECK(verify_gauge(ta, two.source, two.sigma, two.gauge, Tolerance(1e-6)).ok);
}

TEST_CASE("Schottky predicates", "[schottky]") {
  auto t = torus_i();
  auto alpha = t.alpha;
  ExactRep tau{GroupSpec::free_abelian(1), 2, {J}};
  CHECK(is_schottky_module(pullback(tau, alpha), alpha));
  CHECK_FALSE(is_schottky_module(worked_rho(t), alpha));
  CHECK(is_schottky_module(ExactRep::trivial(t.lattice, 2), alpha));

  ExactRep twos{t.lattice, 2, {J, M::scalar(2, 2)}};
  CHECK(is_principal_schottky(twos, alpha));
  CHECK_FALSE(is_schottky_module(twos, alpha));
  CHECK(is_principal_schottky(pullback(tau, alpha), alpha));
  CHECK_FALSE(is_principal_schottky(worked_rho(t), alpha));

  CHECK(ad_schottky_check(twos, alpha));
  CHECK_FALSE(ad_schottky_check(worked_rho(t), alpha));
  CHECK(ad_schottky_check(ExactRep::trivial(t.lattice, 2), alpha));

  // surface side: a_i are the kernel generators
  auto sa = alpha_surface(1);
  CHECK(is_schottky_module(pullback(ExactRep{GroupSpec::free(1), 2, {J}}, sa), sa));
  CHECK(is_principal_schottky(ExactRep{GroupSpec::surface(1), 2, {M::scalar(2, 3), J}}, sa));
}

TEST_CASE("principal Schottky implies Ad-Schottky", "[schottky][property]") {
  gen::Source src(62);
  for (int n = 0; n < 100; ++n) {
    std::size_t g = src.index(1, 2);
    std::size_t r = src.index(1, 3);
    auto lattice = GroupSpec::lattice_unbound(g);
    ExactRep rho = src.any_rep(GroupSpec::free_abelian(g), r, 2);
    ExactRep lifted{lattice, r, rho.images};
    for (std::size_t j = 0; j < g; ++j) lifted.images.push_back(M::scalar(r, src.nonzero(3)));
    auto alpha = alpha_torus(lattice);
    REQUIRE(is_principal_schottky(lifted, alpha));
    REQUIRE(ad_schottky_check(lifted, alpha));
  }
}
