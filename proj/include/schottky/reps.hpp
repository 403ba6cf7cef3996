#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "schottky/groups.hpp"
#include "schottky/polynomial.hpp"

namespace schottky {

/// A finite-dimensional representation given by its generator images.
/// Rank 0 is allowed (all images are 0x0).
template <Scalar S>
struct Representation {
  GroupSpec group;
  std::size_t rank = 0;
  std::vector<Matrix<S>> images;

  static Representation trivial(const GroupSpec& group, std::size_t r) {
    return {group, r, std::vector<Matrix<S>>(group.generator_count(), Matrix<S>::identity(r))};
  }

  const Matrix<S>& image(std::size_t k) const { return images.at(k); }

  template <Scalar T>
  Representation<T> cast() const {
    Representation<T> out{group, rank, {}};
    for (const auto& m : images) out.images.push_back(m.template cast<T>());
    return out;
  }

  friend bool operator==(const Representation&, const Representation&) = default;
};

using ExactRep = Representation<GaussianRational>;
using ApproxRep = Representation<ApproxComplex>;

template <Scalar S>
void require_same_group(const Representation<S>& a, const Representation<S>& b) {
  require_compatible(a.group, b.group);
}

template <Scalar S>
Matrix<S> surface_relation_residual(const Representation<S>& rho, const Tolerance& tol = Tolerance{}) {
  const std::size_t g = rho.group.g();
  Matrix<S> acc = Matrix<S>::identity(rho.rank);
  for (std::size_t i = 0; i < g; ++i) {
    const auto& a = rho.images[i];
    const auto& b = rho.images[g + i];
    acc = acc * a * b * inverse_or_throw(a, tol) * inverse_or_throw(b, tol);
  }
  return acc - Matrix<S>::identity(rho.rank);
}

/// Checks shapes, invertibility, commutation (abelian groups) and the
/// surface relation; returns its argument.
template <Scalar S>
const Representation<S>& validate(const Representation<S>& rho, const Tolerance& tol = Tolerance{}) {
  const auto& group = rho.group;
  if (rho.images.size() != group.generator_count())
    fail(ErrorCode::ShapeMismatch, group.describe() + " needs " + std::to_string(group.generator_count()) +
                                       " images, got " + std::to_string(rho.images.size()));
  for (std::size_t k = 0; k < rho.images.size(); ++k) {
    const auto& m = rho.images[k];
    if (m.rows() != rho.rank || m.cols() != rho.rank)
      fail(ErrorCode::ShapeMismatch, "image of " + group.generator_name(k) + " is " + m.shape() + ", rank is " + std::to_string(rho.rank));
    if (rank(m, tol) != rho.rank) fail(ErrorCode::NotInvertible, "image of generator " + std::to_string(k + 1) + " (" + group.generator_name(k) + ")");
  }
  if (group.is_abelian()) {
    for (std::size_t i = 0; i < rho.images.size(); ++i)
      for (std::size_t j = i + 1; j < rho.images.size(); ++j)
        if (!commute(rho.images[i], rho.images[j], tol))
          fail(ErrorCode::NonCommuting, "generators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " (" +
                                            group.generator_name(i) + ", " + group.generator_name(j) + ")");
  }
  if (group.kind() == GroupKind::Surface) {
    auto residual = surface_relation_residual(rho, tol);
    if (!residual.is_zero(tol))
      throw WitnessError<Matrix<S>>(ErrorCode::SurfaceRelationViolated, "product of commutators is not the identity", residual);
  }
  return rho;
}

template <Scalar S>
Matrix<S> evaluate(const Representation<S>& rho, const Word& w, const Tolerance& tol = Tolerance{}) {
  Word nf = normalize(rho.group, w);
  Matrix<S> acc = Matrix<S>::identity(rho.rank);
  if (nf.is_abelian()) {
    for (std::size_t k = 0; k < nf.exponents().size(); ++k)
      if (nf.exponents()[k] != 0) acc = acc * power(rho.images[k], nf.exponents()[k], tol);
  } else {
    for (const auto& l : nf.letters()) acc = acc * power(rho.images[l.generator], l.exponent, tol);
  }
  return acc;
}

template <Scalar S>
Representation<S> direct_sum(const Representation<S>& a, const Representation<S>& b) {
  require_same_group(a, b);
  Representation<S> out{a.group.has_period() ? a.group : b.group, a.rank + b.rank, {}};
  for (std::size_t k = 0; k < a.images.size(); ++k) out.images.push_back(direct_sum(a.images[k], b.images[k]));
  return out;
}

template <Scalar S>
Representation<S> tensor(const Representation<S>& a, const Representation<S>& b) {
  require_same_group(a, b);
  Representation<S> out{a.group.has_period() ? a.group : b.group, a.rank * b.rank, {}};
  for (std::size_t k = 0; k < a.images.size(); ++k) out.images.push_back(kron(a.images[k], b.images[k]));
  return out;
}

/// Contragredient: images are inverse-transposes.
template <Scalar S>
Representation<S> dual(const Representation<S>& rho, const Tolerance& tol = Tolerance{}) {
  Representation<S> out{rho.group, rho.rank, {}};
  for (const auto& m : rho.images) out.images.push_back(inverse_or_throw(m, tol).transpose());
  return out;
}

/// Canonical basis of { T : T rho1(x) = rho2(x) T for every generator x }.
/// T is rank2 x rank1; the kernel of the stacked Sylvester system is taken
/// in row-major coordinates of T.
template <Scalar S>
std::vector<Matrix<S>> intertwiners(const Representation<S>& rho1, const Representation<S>& rho2,
                                    const Tolerance& tol = Tolerance{}) {
  require_same_group(rho1, rho2);
  const std::size_t r1 = rho1.rank;
  const std::size_t r2 = rho2.rank;
  if (r1 * r2 == 0) return {};
  std::vector<Matrix<S>> blocks;
  const auto id1 = Matrix<S>::identity(r1);
  const auto id2 = Matrix<S>::identity(r2);
  for (std::size_t k = 0; k < rho1.images.size(); ++k)
    blocks.push_back(kron(id2, rho1.images[k].transpose()) - kron(rho2.images[k], id1));
  auto basis = kernel_basis(vstack<S>(blocks, r1 * r2), tol);
  std::vector<Matrix<S>> out;
  for (auto& v : basis) out.emplace_back(r2, r1, std::move(v));
  return out;
}

namespace detail {

// Visits points of {0..side-1}^dim in order of increasing coordinate sum;
// stops when visit returns true.
template <typename Visit>
bool graded_grid(std::size_t dim, long side, Visit&& visit) {
  std::vector<long> point(dim, 0);
  auto fill = [&](auto&& self, std::size_t pos, long remaining) -> bool {
    if (pos + 1 == dim) {
      if (remaining >= side) return false;
      point[pos] = remaining;
      return visit(point);
    }
    for (long v = 0; v < side && v <= remaining; ++v) {
      point[pos] = v;
      if (self(self, pos + 1, remaining - v)) return true;
    }
    return false;
  };
  const long max_total = static_cast<long>(dim) * (side - 1);
  for (long total = 0; total <= max_total; ++total)
    if (fill(fill, 0, total)) return true;
  return false;
}

}  // namespace detail

/// An invertible intertwiner rho1 -> rho2, or nullopt if the two are not
/// isomorphic.
///
/// det(sum_k t_k T_k) has degree at most r in each t_k, so it is the zero
/// polynomial iff it vanishes on the grid {0..r}^d (d = dim Hom). The grid
/// is walked in order of increasing coordinate sum and the first invertible
/// combination is returned. A negative answer costs (r+1)^d rank
/// computations, which is fine for d up to about 9.
template <Scalar S>
std::optional<Matrix<S>> is_isomorphic(const Representation<S>& rho1, const Representation<S>& rho2,
                                       const Tolerance& tol = Tolerance{}) {
  require_same_group(rho1, rho2);
  if (rho1.rank != rho2.rank) return std::nullopt;
  const std::size_t r = rho1.rank;
  if (rho1.images == rho2.images) return Matrix<S>::identity(r);
  auto basis = intertwiners(rho1, rho2, tol);
  if (basis.empty()) return r == 0 ? std::optional<Matrix<S>>(Matrix<S>(0, 0)) : std::nullopt;
  // Hom(rho1, rho2), Hom(rho2, rho1) and End(rho1) all have the same
  // dimension when rho1 and rho2 are isomorphic.
  if (intertwiners(rho2, rho1, tol).size() != basis.size()) return std::nullopt;
  if (intertwiners(rho1, rho1, tol).size() != basis.size()) return std::nullopt;
  std::optional<Matrix<S>> found;
  detail::graded_grid(basis.size(), static_cast<long>(r) + 1, [&](const std::vector<long>& t) {
    Matrix<S> combo(r, r);
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t[k] != 0) combo += basis[k] * S(t[k]);
    if (rank(combo, tol) != r) return false;
    found = std::move(combo);
    return true;
  });
  return found;
}

// ---------------------------------------------------------------------------
// Unipotence (simultaneous unitriangularization)

template <Scalar S>
struct UnipotenceCertificate {
  Matrix<S> triangularizer;              // P with P^-1 rho(x) P unit upper triangular
  std::vector<std::size_t> flag_dims;    // 1, 2, ..., r
};

template <Scalar S>
struct NotUnipotentWitness {
  std::size_t stage;                     // 1-based stage whose common fixed space is zero
  std::vector<Matrix<S>> quotient_images;
};

template <Scalar S>
using UnipotenceResult = std::variant<UnipotenceCertificate<S>, NotUnipotentWitness<S>>;

template <Scalar S>
struct PeelResult {
  Representation<S> sub;       // trivial rank 1
  Representation<S> quotient;  // rank r - 1
  Matrix<S> inclusion;         // r x 1, the fixed vector
  Matrix<S> projection;        // (r-1) x r
  Matrix<S> basis_change;      // Q = [v | complement]; Q^-1 rho Q = [[1, *], [0, quotient]]
};

namespace detail {

/// Common fixed vectors of the images: kernel of the stacked (rho(x) - I).
template <Scalar S>
std::vector<Vector<S>> common_fixed_space(const std::vector<Matrix<S>>& images, std::size_t r, const Tolerance& tol) {
  std::vector<Matrix<S>> blocks;
  const auto id = Matrix<S>::identity(r);
  for (const auto& m : images) blocks.push_back(m - id);
  return kernel_basis(vstack<S>(blocks, r), tol);
}

/// Splits off the first canonical fixed vector, or returns nullopt if the
/// common fixed space is zero.
template <Scalar S>
std::optional<PeelResult<S>> peel_once(const Representation<S>& rho, const Tolerance& tol) {
  const std::size_t r = rho.rank;
  auto fixed = common_fixed_space(rho.images, r, tol);
  if (fixed.empty()) return std::nullopt;
  const Vector<S>& v = fixed.front();
  // Q = [v | e_j, j != f] is invertible for any f with v[f] != 0; take the
  // first such slot.
  std::size_t f = 0;
  while (near_zero(v[f], tol)) ++f;
  Matrix<S> q(r, r);
  for (std::size_t i = 0; i < r; ++i) q(i, 0) = v[i];
  for (std::size_t j = 0, col = 1; j < r; ++j)
    if (j != f) q(j, col++) = S(1);
  Matrix<S> q_inv = inverse_or_throw(q, tol);

  PeelResult<S> out{Representation<S>::trivial(rho.group, 1), {rho.group, r - 1, {}}, q.block(0, 0, r, 1),
                    q_inv.block(1, 0, r - 1, r), q};
  for (const auto& m : rho.images) out.quotient.images.push_back((q_inv * m * q).block(1, 1, r - 1, r - 1));
  return out;
}

}  // namespace detail

/// Kolchin flag: repeatedly split off a common fixed vector. Succeeds iff
/// the images are simultaneously conjugate to unit upper triangular form.
template <Scalar S>
UnipotenceResult<S> unipotence_flag(const Representation<S>& rho, const Tolerance& tol = Tolerance{}) {
  const std::size_t r = rho.rank;
  Matrix<S> p = Matrix<S>::identity(r);
  Representation<S> current = rho;
  std::vector<std::size_t> dims;
  for (std::size_t stage = 0; stage < r; ++stage) {
    auto step = detail::peel_once(current, tol);
    if (!step) return NotUnipotentWitness<S>{stage + 1, current.images};
    Matrix<S> lift = Matrix<S>::identity(r);
    lift.set_block(stage, stage, step->basis_change);
    p = p * lift;
    dims.push_back(stage + 1);
    current = std::move(step->quotient);
  }
  return UnipotenceCertificate<S>{std::move(p), std::move(dims)};
}

template <Scalar S>
bool is_unipotent(const Representation<S>& rho, const Tolerance& tol = Tolerance{}) {
  return std::holds_alternative<UnipotenceCertificate<S>>(unipotence_flag(rho, tol));
}

/// Exact re-check of a certificate: P^-1 rho(x) P - I strictly upper
/// triangular for every generator.
template <Scalar S>
bool verify_certificate(const Representation<S>& rho, const UnipotenceCertificate<S>& cert,
                        const Tolerance& tol = Tolerance{}) {
  auto p_inv = inverse(cert.triangularizer, tol);
  if (!p_inv) return false;
  for (const auto& m : rho.images) {
    Matrix<S> t = *p_inv * m * cert.triangularizer;
    for (std::size_t i = 0; i < rho.rank; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        S expected = i == j ? S(1) : S(0);
        if (!near_zero(t(i, j) - expected, tol)) return false;
      }
  }
  return true;
}

/// 0 -> C -> rho -> quotient -> 0 with C spanned by the first flag vector.
template <Scalar S>
PeelResult<S> peel(const Representation<S>& rho, const Tolerance& tol = Tolerance{}) {
  if (rho.rank == 0) fail(ErrorCode::NotUnipotent, "nothing to peel from a rank-0 representation");
  if (!is_unipotent(rho, tol)) fail(ErrorCode::NotUnipotent, "representation has no Kolchin flag");
  return *detail::peel_once(rho, tol);
}

/// Images are tau(alpha(x)) for each source generator x.
template <Scalar S>
Representation<S> pullback(const Representation<S>& tau, const Morphism& alpha, const Tolerance& tol = Tolerance{}) {
  require_compatible(tau.group, alpha.target);
  Representation<S> out{alpha.source, tau.rank, {}};
  for (const auto& w : alpha.images) out.images.push_back(evaluate(tau, w, tol));
  return out;
}

/// Ad(g) X = g X g^-1 on row-major vec(X): kron(g, g^-T).
template <Scalar S>
Matrix<S> adjoint_matrix(const Matrix<S>& g, const Tolerance& tol = Tolerance{}) {
  return kron(g, inverse_or_throw(g, tol).transpose());
}

template <Scalar S>
Representation<S> adjoint_rep(const Representation<S>& rho, const Tolerance& tol = Tolerance{}) {
  Representation<S> out{rho.group, rho.rank * rho.rank, {}};
  for (const auto& m : rho.images) out.images.push_back(adjoint_matrix(m, tol));
  return out;
}

// ---------------------------------------------------------------------------
// Jordan-Chevalley

template <Scalar S>
struct JordanPair {
  Matrix<S> semisimple;
  Matrix<S> unipotent;
  Polynomial<S> squarefree;  // squarefree part of the characteristic polynomial
};

/// M = s u with s semisimple, u unipotent, su = us. Newton iteration on the
/// squarefree part of the characteristic polynomial; no factoring needed.
template <Scalar S>
JordanPair<S> jordan_decompose(const Matrix<S>& m) {
  static_assert(ScalarTraits<S>::exact, "Jordan-Chevalley runs on the exact backend");
  require_square(m, "jordan_decompose");
  const std::size_t r = m.rows();
  if (rank(m) != r) fail(ErrorCode::NotInvertible, "jordan_decompose needs an invertible matrix");
  auto f_sep = squarefree_part(characteristic_polynomial(m));
  auto df = f_sep.derivative();
  std::size_t steps = 1;
  for (std::size_t reach = 1; reach < r; reach *= 2) ++steps;
  Matrix<S> s = m;
  for (std::size_t k = 0; k < steps; ++k) {
    Matrix<S> residual = f_sep(s);
    if (residual.is_zero()) break;
    auto slope = inverse(df(s));
    if (!slope) fail(ErrorCode::Internal, "f_sep'(s) singular during Newton iteration");
    s -= residual * *slope;
  }
  auto s_inv = inverse(s);
  if (!s_inv) fail(ErrorCode::Internal, "semisimple part is singular");
  JordanPair<S> out{s, *s_inv * m, f_sep};
  if (!(out.semisimple * out.unipotent == m) || !(out.unipotent * out.semisimple == m) || !f_sep(s).is_zero() ||
      !is_nilpotent(Matrix<S>(out.unipotent - Matrix<S>::identity(r))))
    fail(ErrorCode::Internal, "Jordan-Chevalley invariants failed");
  return out;
}

}  // namespace schottky
