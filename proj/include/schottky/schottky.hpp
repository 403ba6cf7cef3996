#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schottky/reps.hpp"

namespace schottky {

/// A complex torus V / Lambda with period matrix Pi = (Z, I), Z symmetric
/// and invertible.
template <Scalar S>
struct TorusData {
  std::size_t g = 0;
  Matrix<S> period;
  GroupSpec lattice;
  Morphism alpha;

  template <Scalar T>
  TorusData<T> cast() const {
    return make_torus(period.template cast<T>());
  }
};

template <Scalar S>
TorusData<S> make_torus(const Matrix<S>& z, const Tolerance& tol = Tolerance{}) {
  GroupSpec lattice = GroupSpec::lattice(z, tol);
  return TorusData<S>{z.rows(), z, lattice, alpha_torus(lattice)};
}

/// Coefficients of the constant 1-form A_1 dz_1 + ... + A_g dz_g whose
/// exponentiated periods f(lambda + z) f(z)^-1 gauge rho into sigma.
template <Scalar S>
struct SchottkyGauge {
  std::vector<Matrix<S>> coefficients;
  static constexpr const char* backend = ScalarTraits<S>::name;

  friend bool operator==(const SchottkyGauge&, const SchottkyGauge&) = default;
};

template <Scalar S>
struct SchottkyResult {
  Representation<S> sigma;  // representation of Z^g
  SchottkyGauge<S> gauge;
};

template <Scalar S>
struct GaugeReport {
  bool ok = true;
  std::string failed_check;        // empty when ok
  std::optional<std::size_t> index;  // generator / coefficient involved
  std::optional<Matrix<S>> residual;
  double max_residual = 0.0;       // worst residual over all identities checked
};

namespace detail {

template <Scalar S>
void require_torus_rep(const TorusData<S>& torus, const GroupSpec& group) {
  if (group.kind() != GroupKind::Lattice) fail(ErrorCode::GroupMismatch, "expected a lattice representation, got " + group.describe());
  if (!compatible(group, torus.lattice)) fail(ErrorCode::GroupMismatch, group.describe() + " does not match the torus lattice");
}

template <Scalar S>
Matrix<S> gauge_exp(const Matrix<S>& a, const Tolerance& tol) {
  if constexpr (ScalarTraits<S>::exact)
    return exp_nilpotent(a, tol);
  else
    return expm(a);
}

/// sum_j c_j A_j
template <Scalar S>
Matrix<S> combine(const Matrix<S>& coords, std::size_t row, const std::vector<Matrix<S>>& a, std::size_t r) {
  Matrix<S> sum(r, r);
  for (std::size_t j = 0; j < a.size(); ++j)
    if (!coords(row, j).is_zero()) sum += a[j] * coords(row, j);
  return sum;
}

}  // namespace detail

/// Unipotent lattice representation -> representation of Z^g defining an
/// isomorphic bundle: A_j = -log rho(lambda_{g+j}),
/// sigma(B_i) = exp(sum_j Z_ij A_j) rho(lambda_i).
inline SchottkyResult<GaussianRational> schottkyize_unipotent(const TorusData<GaussianRational>& torus,
                                                              const ExactRep& rho) {
  detail::require_torus_rep(torus, rho.group);
  validate(rho);
  if (!is_unipotent(rho)) fail(ErrorCode::NotUnipotent, "lattice representation has no Kolchin flag");
  const std::size_t g = torus.g;
  const std::size_t r = rho.rank;
  SchottkyResult<GaussianRational> out{{GroupSpec::free_abelian(g), r, {}}, {}};
  for (std::size_t j = 0; j < g; ++j) out.gauge.coefficients.push_back(-log_unipotent(rho.images[g + j]));
  for (std::size_t i = 0; i < g; ++i)
    out.sigma.images.push_back(exp_nilpotent(detail::combine(torus.period, i, out.gauge.coefficients, r)) * rho.images[i]);
  try {
    validate(out.sigma);
  } catch (const Error& e) {
    fail(ErrorCode::Internal, std::string("Schottky representation failed validation: ") + e.what());
  }
  return out;
}

/// Checks every identity a gauge must satisfy, in this order: nilpotent
/// coefficients (exact backend), coefficients commute with each other and
/// with rho, exp(A_j) rho(lambda_{g+j}) = I, and for every lattice generator
/// exp(sum_j c_j A_j) rho(lambda) = sigma(alpha(lambda)), where c are the
/// generator's coordinates in Pi = (Z, I).
template <Scalar S>
GaugeReport<S> verify_gauge(const TorusData<S>& torus, const Representation<S>& rho, const Representation<S>& sigma,
                            const SchottkyGauge<S>& gauge, const Tolerance& tol = Tolerance{}) {
  GaugeReport<S> report;
  auto fail_with = [&](const std::string& check, std::optional<std::size_t> index, std::optional<Matrix<S>> residual) {
    report.ok = false;
    report.failed_check = check;
    report.index = index;
    report.residual = std::move(residual);
    return report;
  };
  auto track = [&](const Matrix<S>& lhs, const Matrix<S>& rhs) {
    double d = max_abs_diff(lhs, rhs);
    report.max_residual = std::max(report.max_residual, d);
    return near_equal(lhs, rhs, tol);
  };

  const std::size_t g = torus.g;
  const std::size_t r = rho.rank;
  if (rho.group.kind() != GroupKind::Lattice || !compatible(rho.group, torus.lattice))
    return fail_with("rho-group", std::nullopt, std::nullopt);
  if (sigma.group.kind() != GroupKind::FreeAbelian || sigma.group.g() != g || sigma.rank != r)
    return fail_with("sigma-group", std::nullopt, std::nullopt);
  if (gauge.coefficients.size() != g) return fail_with("gauge-shape", std::nullopt, std::nullopt);
  for (std::size_t j = 0; j < g; ++j)
    if (gauge.coefficients[j].rows() != r || gauge.coefficients[j].cols() != r) return fail_with("gauge-shape", j, std::nullopt);
  try {
    validate(sigma, tol);
  } catch (const Error&) {
    return fail_with("sigma-valid", std::nullopt, std::nullopt);
  }

  const auto& a = gauge.coefficients;
  if constexpr (ScalarTraits<S>::exact) {
    for (std::size_t j = 0; j < g; ++j)
      if (!is_nilpotent(a[j], tol)) return fail_with("nilpotent", j, a[j]);
  }
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j)
      if (!track(a[i] * a[j], a[j] * a[i])) return fail_with("gauge-commute", i, Matrix<S>(a[i] * a[j] - a[j] * a[i]));
  for (std::size_t j = 0; j < g; ++j)
    for (const auto& x : rho.images)
      if (!track(a[j] * x, x * a[j])) return fail_with("gauge-commutes-with-rho", j, Matrix<S>(a[j] * x - x * a[j]));
  const auto id = Matrix<S>::identity(r);
  for (std::size_t j = 0; j < g; ++j) {
    Matrix<S> lhs = detail::gauge_exp(a[j], tol) * rho.images[g + j];
    if (!track(lhs, id)) return fail_with("exp-identity", j, Matrix<S>(lhs - id));
  }
  const Matrix<S> coords = torus.lattice.template lattice_coordinates<S>();
  Representation<S> factored = pullback(sigma, Morphism{rho.group, sigma.group, torus.alpha.images}, tol);
  for (std::size_t k = 0; k < 2 * g; ++k) {
    Matrix<S> lhs = detail::gauge_exp(detail::combine(coords, k, a, r), tol) * rho.images[k];
    if (!track(lhs, factored.images[k])) return fail_with("generator-identity", k, Matrix<S>(lhs - factored.images[k]));
  }
  return report;
}

/// Rank-1 case on the approximate backend: A_j = -log chi(lambda_{g+j})
/// (principal branch), sigma(B_i) = exp(sum_j Z_ij A_j) chi(lambda_i).
inline SchottkyResult<ApproxComplex> schottkyize_character(const TorusData<ApproxComplex>& torus, const ApproxRep& chi,
                                                           const Tolerance& tol = Tolerance{}) {
  detail::require_torus_rep(torus, chi.group);
  if (chi.rank != 1) fail(ErrorCode::ShapeMismatch, "a character has rank 1");
  if (chi.images.size() != chi.group.generator_count()) fail(ErrorCode::ShapeMismatch, "character needs 2g images");
  for (std::size_t k = 0; k < chi.images.size(); ++k)
    if (chi.images[k](0, 0).abs() <= tol.eps) fail(ErrorCode::Domain, "character value on " + chi.group.generator_name(k) + " is zero");
  const std::size_t g = torus.g;
  SchottkyResult<ApproxComplex> out{{GroupSpec::free_abelian(g), 1, {}}, {}};
  for (std::size_t j = 0; j < g; ++j)
    out.gauge.coefficients.push_back(ApproxMatrix{{-principal_log(chi.images[g + j](0, 0), tol)}});
  for (std::size_t i = 0; i < g; ++i) {
    ApproxComplex exponent(0.0);
    for (std::size_t j = 0; j < g; ++j) exponent += torus.period(i, j) * out.gauge.coefficients[j](0, 0);
    out.sigma.images.push_back(ApproxMatrix{{complex_exp(exponent) * chi.images[i](0, 0)}});
  }
  for (std::size_t j = 0; j < g; ++j) {
    ApproxComplex gauged = complex_exp(out.gauge.coefficients[j](0, 0)) * chi.images[g + j](0, 0);
    if ((gauged - ApproxComplex(1.0)).abs() > tol.eps)
      fail(ErrorCode::Internal, "gauged kernel image deviates from 1 by more than eps");
  }
  return out;
}

/// One indecomposable flat summand, given as character (x) unipotent.
struct FlatComponent {
  ApproxRep character;
  ExactRep unipotent;
};

struct FlatSumResult {
  ApproxRep sigma;                    // representation of Z^g
  SchottkyGauge<ApproxComplex> gauge;  // block diagonal a_j I + A_j
  ApproxRep source;                   // (+)_c chi_c (x) rho_c on the lattice
  std::vector<double> kernel_residuals;  // per component: max_j |gauged lambda_{g+j} - I|
};

/// Flat bundle given in character (x) unipotent components -> Schottky
/// representation of Z^g. The unipotent parts are handled exactly and then
/// cast; characters use the principal logarithm.
inline FlatSumResult schottkyize_flat_sum(const TorusData<GaussianRational>& torus, const std::vector<FlatComponent>& components,
                                          const Tolerance& tol = Tolerance{}) {
  if (components.empty()) fail(ErrorCode::ShapeMismatch, "flat sum needs at least one component");
  const auto approx_torus = torus.cast<ApproxComplex>();
  const std::size_t g = torus.g;
  std::optional<FlatSumResult> acc;
  for (const auto& comp : components) {
    validate(comp.character, tol);
    auto chi_part = schottkyize_character(approx_torus, comp.character, tol);
    auto uni_part = schottkyize_unipotent(torus, comp.unipotent);
    const std::size_t r = comp.unipotent.rank;
    ApproxRep sigma = tensor(chi_part.sigma, uni_part.sigma.cast<ApproxComplex>());
    ApproxRep chi = comp.character;
    chi.group = approx_torus.lattice;
    ApproxRep rho = comp.unipotent.cast<ApproxComplex>();
    rho.group = approx_torus.lattice;
    ApproxRep source = tensor(chi, rho);
    SchottkyGauge<ApproxComplex> gauge;
    double worst = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      ApproxMatrix a = ApproxMatrix::scalar(r, chi_part.gauge.coefficients[j](0, 0)) +
                       uni_part.gauge.coefficients[j].cast<ApproxComplex>();
      ApproxMatrix gauged = expm(a) * source.images[g + j];
      worst = std::max(worst, max_abs_diff(gauged, ApproxMatrix::identity(r)));
      gauge.coefficients.push_back(std::move(a));
    }
    if (!acc) {
      acc = FlatSumResult{std::move(sigma), std::move(gauge), std::move(source), {worst}};
      continue;
    }
    acc->sigma = direct_sum(acc->sigma, sigma);
    acc->source = direct_sum(acc->source, source);
    for (std::size_t j = 0; j < g; ++j)
      acc->gauge.coefficients[j] = direct_sum(acc->gauge.coefficients[j], gauge.coefficients[j]);
    acc->kernel_residuals.push_back(worst);
  }
  return std::move(*acc);
}

// ---------------------------------------------------------------------------
// Predicates

namespace detail {

/// Generators of the source that alpha kills. Valid as generators of
/// ker(alpha) (as a normal subgroup) when every other generator maps to a
/// distinct target generator, which holds for both canonical alphas.
inline std::vector<std::size_t> kernel_generators(const Morphism& alpha) {
  std::vector<std::size_t> killed;
  std::vector<bool> hit(alpha.target.generator_count(), false);
  for (std::size_t k = 0; k < alpha.images.size(); ++k) {
    const Word& w = alpha.images[k];
    if (w.is_identity()) {
      killed.push_back(k);
      continue;
    }
    std::optional<std::size_t> gen;
    if (w.is_abelian()) {
      for (std::size_t t = 0; t < w.exponents().size(); ++t)
        if (w.exponents()[t] != 0) {
          if (gen || w.exponents()[t] != 1) gen = alpha.target.generator_count();
          else gen = t;
        }
    } else if (w.letters().size() == 1 && w.letters()[0].exponent == 1) {
      gen = w.letters()[0].generator;
    }
    if (!gen || *gen >= hit.size() || hit[*gen])
      fail(ErrorCode::Unsupported, "kernel of this morphism is not generated by killed generators");
    hit[*gen] = true;
  }
  return killed;
}

}  // namespace detail

/// True iff rho factors through alpha, i.e. rho is trivial on ker(alpha).
template <Scalar S>
bool is_schottky_module(const Representation<S>& rho, const Morphism& alpha, const Tolerance& tol = Tolerance{}) {
  require_compatible(rho.group, alpha.source);
  const auto id = Matrix<S>::identity(rho.rank);
  for (auto k : detail::kernel_generators(alpha))
    if (!near_equal(rho.images[k], id, tol)) return false;
  return true;
}

/// True iff rho maps ker(alpha) into the centre of GL_r (scalar matrices).
template <Scalar S>
bool is_principal_schottky(const Representation<S>& rho, const Morphism& alpha, const Tolerance& tol = Tolerance{}) {
  require_compatible(rho.group, alpha.source);
  for (auto k : detail::kernel_generators(alpha))
    if (!is_scalar_matrix(rho.images[k], tol)) return false;
  return true;
}

/// Whether Ad(rho) factors through alpha.
template <Scalar S>
bool ad_schottky_check(const Representation<S>& rho, const Morphism& alpha, const Tolerance& tol = Tolerance{}) {
  return is_schottky_module(adjoint_rep(rho, tol), alpha, tol);
}

}  // namespace schottky
