#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schottky/reps.hpp"

namespace schottky {

// Cocycle-level H^0 / H^1 for F_g and the free abelian groups Z^g and
// Lambda = Z^2g. A 1-cocycle is its vector of values on the generators; the
// cocycle rule is c(xy) = c(x) + rho(x) c(y).

template <Scalar S>
struct Cocycle {
  Representation<S> coefficients;
  std::vector<Vector<S>> values;  // one vector of length rank per generator

  const GroupSpec& group() const { return coefficients.group; }

  Vector<S> stacked() const {
    Vector<S> out;
    for (const auto& v : values) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  friend bool operator==(const Cocycle&, const Cocycle&) = default;
};

template <Scalar S>
struct H1Result {
  std::size_t dim = 0;
  std::vector<Vector<S>> cocycles;     // basis of Z^1, stacked generator values
  std::vector<Vector<S>> coboundaries;  // canonical (echelon) basis of B^1
};

/// An H^1 class with its canonical representative: the stacked cocycle
/// reduced against the echelon basis of B^1.
template <Scalar S>
struct ExtClass {
  Cocycle<S> cocycle;
  Vector<S> representative;
};

template <Scalar S>
struct Extension {
  Representation<S> sub;       // B
  Representation<S> quotient;  // A
  Representation<S> total;     // E
  Matrix<S> inclusion;         // rank(E) x rank(B)
  Matrix<S> projection;        // rank(A) x rank(E)
};

namespace detail {

inline void require_cohomology_group(const GroupSpec& group) {
  if (group.kind() == GroupKind::Surface)
    fail(ErrorCode::Unsupported, "cocycle cohomology is implemented for free and free abelian groups only");
}

}  // namespace detail

/// Stacked (rho(x_k) - I): its image is B^1 and its kernel is H^0.
template <Scalar S>
Matrix<S> coboundary_matrix(const Representation<S>& m) {
  std::vector<Matrix<S>> blocks;
  const auto id = Matrix<S>::identity(m.rank);
  for (const auto& x : m.images) blocks.push_back(x - id);
  return vstack<S>(blocks, m.rank);
}

/// Rows encode (rho(x_i) - 1) c_j - (rho(x_j) - 1) c_i = 0 for i < j: the
/// Koszul condition that makes a generator assignment a cocycle of an
/// abelian group. Empty (0 rows) for free groups.
template <Scalar S>
Matrix<S> cocycle_condition_matrix(const Representation<S>& m) {
  const std::size_t n = m.images.size();
  const std::size_t r = m.rank;
  if (!m.group.is_abelian() || n < 2) return Matrix<S>(0, n * r);
  const auto id = Matrix<S>::identity(r);
  Matrix<S> k((n * (n - 1) / 2) * r, n * r);
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      k.set_block(row, j * r, m.images[i] - id);
      k.set_block(row, i * r, id - m.images[j]);
      row += r;
    }
  return k;
}

template <Scalar S>
std::vector<Vector<S>> h0(const Representation<S>& m, const Tolerance& tol = Tolerance{}) {
  detail::require_cohomology_group(m.group);
  if (m.rank == 0) return {};
  return kernel_basis(coboundary_matrix(m), tol);
}

template <Scalar S>
H1Result<S> h1(const Representation<S>& m, const Tolerance& tol = Tolerance{}) {
  detail::require_cohomology_group(m.group);
  const std::size_t width = m.images.size() * m.rank;
  H1Result<S> out;
  if (width == 0) return out;
  if (m.group.is_abelian()) {
    out.cocycles = kernel_basis(cocycle_condition_matrix(m), tol);
  } else {
    for (std::size_t k = 0; k < width; ++k) {
      Vector<S> e(width, S(0));
      e[k] = S(1);
      out.cocycles.push_back(std::move(e));
    }
  }
  out.coboundaries = column_space_basis(coboundary_matrix(m), tol);
  out.dim = out.cocycles.size() - out.coboundaries.size();
  return out;
}

/// Residual of the cocycle condition (empty or zero when valid).
template <Scalar S>
Vector<S> cocycle_residual(const Cocycle<S>& c) {
  auto v = c.stacked();
  return cocycle_condition_matrix(c.coefficients) * std::span<const S>(v);
}

template <Scalar S>
void require_valid_cocycle(const Cocycle<S>& c, const Tolerance& tol = Tolerance{}) {
  detail::require_cohomology_group(c.group());
  if (c.values.size() != c.coefficients.images.size())
    fail(ErrorCode::ShapeMismatch, "cocycle needs one value per generator");
  for (const auto& v : c.values)
    if (v.size() != c.coefficients.rank) fail(ErrorCode::ShapeMismatch, "cocycle value has the wrong length");
  auto res = cocycle_residual(c);
  for (const auto& x : res)
    if (!near_zero(x, tol)) {
      Matrix<S> witness(res.size(), 1, res);
      throw WitnessError<Matrix<S>>(ErrorCode::InvalidCocycle, "Koszul condition violated", witness);
    }
}

template <Scalar S>
Vector<S> canonical_representative(const Representation<S>& m, Vector<S> v, const Tolerance& tol = Tolerance{}) {
  auto ech = rref(coboundary_matrix(m).transpose(), tol);
  for (std::size_t row = 0; row < ech.pivots.size(); ++row) {
    S f = v[ech.pivots[row]];
    if (near_zero(f, tol)) continue;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * ech.reduced(row, j);
  }
  return v;
}

template <Scalar S>
ExtClass<S> class_of(const Cocycle<S>& c, const Tolerance& tol = Tolerance{}) {
  require_valid_cocycle(c, tol);
  return {c, canonical_representative(c.coefficients, c.stacked(), tol)};
}

/// c1 ~ c2 iff c1 - c2 lies in B^1 (rank test against the coboundary span).
template <Scalar S>
bool class_eq(const Cocycle<S>& c1, const Cocycle<S>& c2, const Tolerance& tol = Tolerance{}) {
  if (!compatible(c1.group(), c2.group()) || c1.coefficients.rank != c2.coefficients.rank ||
      !(c1.coefficients.images == c2.coefficients.images))
    fail(ErrorCode::CoefficientMismatch, "cocycles have different coefficient modules");
  auto a = c1.stacked();
  auto b = c2.stacked();
  if (a.size() != b.size()) fail(ErrorCode::CoefficientMismatch, "cocycle value counts differ");
  Vector<S> diff(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) diff[k] = a[k] - b[k];
  Matrix<S> d = coboundary_matrix(c1.coefficients);
  if (d.cols() == 0) return std::all_of(diff.begin(), diff.end(), [&](const S& x) { return near_zero(x, tol); });
  std::size_t base = rank(d, tol);
  return rank(hstack(d, Matrix<S>::column(diff)), tol) == base;
}

template <Scalar S>
bool class_eq(const ExtClass<S>& c1, const ExtClass<S>& c2, const Tolerance& tol = Tolerance{}) {
  return class_eq(c1.cocycle, c2.cocycle, tol);
}

// ---------------------------------------------------------------------------
// Ext^1 through Hom(A, B) = A* (x) B.
//
// Coordinates: slot i * rank(B) + k of a Hom vector is entry (k, i) of the
// rank(B) x rank(A) matrix T, and x acts by T -> B(x) T A(x)^-1.

template <Scalar S>
Representation<S> hom_rep(const Representation<S>& a, const Representation<S>& b, const Tolerance& tol = Tolerance{}) {
  return tensor(dual(a, tol), b);
}

template <Scalar S>
Matrix<S> hom_vector_to_matrix(std::span<const S> v, std::size_t rank_a, std::size_t rank_b) {
  if (v.size() != rank_a * rank_b) fail(ErrorCode::ShapeMismatch, "Hom vector has the wrong length");
  Matrix<S> t(rank_b, rank_a);
  for (std::size_t i = 0; i < rank_a; ++i)
    for (std::size_t k = 0; k < rank_b; ++k) t(k, i) = v[i * rank_b + k];
  return t;
}

template <Scalar S>
Vector<S> matrix_to_hom_vector(const Matrix<S>& t) {
  Vector<S> v(t.rows() * t.cols());
  for (std::size_t i = 0; i < t.cols(); ++i)
    for (std::size_t k = 0; k < t.rows(); ++k) v[i * t.rows() + k] = t(k, i);
  return v;
}

template <Scalar S>
H1Result<S> ext1(const Representation<S>& a, const Representation<S>& b, const Tolerance& tol = Tolerance{}) {
  require_same_group(a, b);
  return h1(hom_rep(a, b, tol), tol);
}

/// E(x) = [[B(x), d(x) A(x)], [0, A(x)]] for a Hom(A, B)-valued cocycle d.
/// The corner c(x) = d(x) A(x) obeys c(xy) = B(x) c(y) + c(x) A(y), which is
/// exactly block multiplication.
template <Scalar S>
Extension<S> build_extension(const Representation<S>& a, const Representation<S>& b, const Cocycle<S>& d,
                             const Tolerance& tol = Tolerance{}) {
  require_same_group(a, b);
  auto hom = hom_rep(a, b, tol);
  if (!compatible(d.group(), hom.group) || d.coefficients.rank != hom.rank || !(d.coefficients.images == hom.images))
    fail(ErrorCode::CoefficientMismatch, "cocycle coefficients are not Hom(A, B)");
  require_valid_cocycle(d, tol);
  const std::size_t ra = a.rank;
  const std::size_t rb = b.rank;
  Extension<S> out{b, a, {a.group, ra + rb, {}}, Matrix<S>(ra + rb, rb), Matrix<S>(ra, ra + rb)};
  for (std::size_t k = 0; k < a.images.size(); ++k) {
    Matrix<S> e(ra + rb, ra + rb);
    e.set_block(0, 0, b.images[k]);
    e.set_block(0, rb, hom_vector_to_matrix<S>(d.values[k], ra, rb) * a.images[k]);
    e.set_block(rb, rb, a.images[k]);
    out.total.images.push_back(std::move(e));
  }
  out.inclusion.set_block(0, 0, Matrix<S>::identity(rb));
  out.projection.set_block(0, rb, Matrix<S>::identity(ra));
  try {
    validate(out.total, tol);
  } catch (const Error& e) {
    fail(ErrorCode::Internal, std::string("extension failed validation: ") + e.what());
  }
  return out;
}

namespace detail {

// Q = [inclusion | section]. The section uses the standard basis vectors
// outside the pivot rows of the inclusion's column echelon form, rescaled so
// that projection o section = I.
template <Scalar S>
Matrix<S> splitting_basis(const Matrix<S>& inclusion, const Matrix<S>& projection, const Tolerance& tol) {
  const std::size_t re = inclusion.rows();
  const std::size_t ra = projection.rows();
  auto ech = rref(inclusion.transpose(), tol);
  std::vector<bool> used(re, false);
  for (auto p : ech.pivots) used[p] = true;
  Matrix<S> complement(re, ra);
  for (std::size_t j = 0, col = 0; j < re; ++j)
    if (!used[j]) complement(j, col++) = S(1);
  auto pc_inv = inverse(Matrix<S>(projection * complement), tol);
  if (!pc_inv) fail(ErrorCode::NotExact, "kernel of projection differs from the image of inclusion");
  return hstack(inclusion, Matrix<S>(complement * *pc_inv));
}

}  // namespace detail

/// Recovers B, A and the conjugated E from E and the maps of
/// 0 -> B -> E -> A -> 0, after checking exactness.
template <Scalar S>
Extension<S> split_extension_data(const Representation<S>& e, const Matrix<S>& inclusion, const Matrix<S>& projection,
                                  const Tolerance& tol = Tolerance{}) {
  const std::size_t re = e.rank;
  const std::size_t rb = inclusion.cols();
  const std::size_t ra = projection.rows();
  if (inclusion.rows() != re || projection.cols() != re)
    fail(ErrorCode::ShapeMismatch, "inclusion/projection shapes do not match E");
  auto composite = projection * inclusion;
  if (!composite.is_zero(tol))
    throw WitnessError<Matrix<S>>(ErrorCode::NotExact, "projection o inclusion is not zero", composite);
  if (rank(inclusion, tol) != rb || rank(projection, tol) != ra || ra + rb != re)
    fail(ErrorCode::NotExact, "inclusion must be injective, projection surjective, and ranks must add up");

  Extension<S> out{{e.group, rb, {}}, {e.group, ra, {}}, e, inclusion, projection};
  Matrix<S> q = detail::splitting_basis(inclusion, projection, tol);
  Matrix<S> q_inv = inverse_or_throw(q, tol);
  for (const auto& x : e.images) {
    Matrix<S> conj = q_inv * x * q;
    Matrix<S> lower = conj.block(rb, 0, ra, rb);
    if (!lower.is_zero(tol))
      throw WitnessError<Matrix<S>>(ErrorCode::NotExact, "image of inclusion is not invariant", lower);
    out.sub.images.push_back(conj.block(0, 0, rb, rb));
    out.quotient.images.push_back(conj.block(rb, rb, ra, ra));
  }
  return out;
}

/// Class of the extension: in the split basis E(x) is block upper
/// triangular and the corner c(x) gives the Hom-valued cocycle
/// d(x) = c(x) A(x)^-1.
template <Scalar S>
ExtClass<S> extract_class(const Representation<S>& e, const Matrix<S>& inclusion, const Matrix<S>& projection,
                          const Tolerance& tol = Tolerance{}) {
  auto parts = split_extension_data(e, inclusion, projection, tol);
  const std::size_t rb = parts.sub.rank;
  const std::size_t ra = parts.quotient.rank;
  Matrix<S> q = detail::splitting_basis(inclusion, projection, tol);
  Matrix<S> q_inv = inverse_or_throw(q, tol);
  Cocycle<S> d{hom_rep(parts.quotient, parts.sub, tol), {}};
  for (std::size_t k = 0; k < e.images.size(); ++k) {
    Matrix<S> corner = (q_inv * e.images[k] * q).block(0, rb, rb, ra);
    d.values.push_back(matrix_to_hom_vector(Matrix<S>(corner * inverse_or_throw(parts.quotient.images[k], tol))));
  }
  return class_of(d, tol);
}

template <Scalar S>
ExtClass<S> extract_class(const Extension<S>& ext, const Tolerance& tol = Tolerance{}) {
  return extract_class(ext.total, ext.inclusion, ext.projection, tol);
}

// ---------------------------------------------------------------------------
// Evaluation on words, pullback, connecting map

/// c(w) from the generator values via the cocycle rule.
template <Scalar S>
Vector<S> cocycle_value(const Cocycle<S>& c, const Word& w, const Tolerance& tol = Tolerance{}) {
  const auto& m = c.coefficients;
  Word nf = normalize(m.group, w);
  Vector<S> acc(m.rank, S(0));
  Matrix<S> prefix = Matrix<S>::identity(m.rank);
  auto absorb = [&](std::size_t gen, long exponent) {
    const Matrix<S>& x = m.images[gen];
    Matrix<S> step = exponent > 0 ? x : inverse_or_throw(x, tol);
    Vector<S> base = c.values[gen];
    if (exponent < 0) {
      base = step * std::span<const S>(base);
      for (auto& s : base) s = -s;
    }
    for (long k = 0; k < std::labs(exponent); ++k) {
      auto add = prefix * std::span<const S>(base);
      for (std::size_t i = 0; i < add.size(); ++i) acc[i] += add[i];
      prefix = prefix * step;
    }
  };
  if (nf.is_abelian()) {
    for (std::size_t k = 0; k < nf.exponents().size(); ++k)
      if (nf.exponents()[k] != 0) absorb(k, nf.exponents()[k]);
  } else {
    for (const auto& l : nf.letters()) absorb(l.generator, l.exponent);
  }
  return acc;
}

template <Scalar S>
Cocycle<S> pullback_cocycle(const Cocycle<S>& c, const Morphism& alpha, const Tolerance& tol = Tolerance{}) {
  Cocycle<S> out{pullback(c.coefficients, alpha, tol), {}};
  for (const auto& w : alpha.images) out.values.push_back(cocycle_value(c, w, tol));
  return out;
}

/// For 0 -> C -> rho -> Q -> 0 (from peel) and an invariant q of Q, the
/// connecting cocycle x -> (rho(x) - 1) s(q), read in the sub line C.
template <Scalar S>
Cocycle<S> connecting_cocycle(const Representation<S>& rho, const PeelResult<S>& ses, std::span<const S> q,
                              const Tolerance& tol = Tolerance{}) {
  const std::size_t r = rho.rank;
  if (q.size() + 1 != r) fail(ErrorCode::ShapeMismatch, "invariant has the wrong length");
  Vector<S> lifted_coords(r, S(0));
  for (std::size_t k = 0; k < q.size(); ++k) lifted_coords[k + 1] = q[k];
  Vector<S> lift = ses.basis_change * std::span<const S>(lifted_coords);
  Cocycle<S> out{ses.sub, {}};
  for (const auto& x : rho.images) {
    Vector<S> moved = (x - Matrix<S>::identity(r)) * std::span<const S>(lift);
    auto coeff = solve(ses.inclusion, std::span<const S>(moved), tol);
    if (!coeff) fail(ErrorCode::NotExact, "q is not invariant in the quotient");
    out.values.push_back(*coeff);
  }
  return out;
}

}  // namespace schottky
