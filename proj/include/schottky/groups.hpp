#pragma once

#include <cctype>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "schottky/matrix.hpp"

namespace schottky {

enum class GroupKind { Free, FreeAbelian, Lattice, Surface };

inline const char* kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::Free: return "FreeGroup";
    case GroupKind::FreeAbelian: return "FreeAbelian";
    case GroupKind::Lattice: return "Lattice";
    case GroupKind::Surface: return "SurfaceGroup";
  }
  return "?";
}

/// One of F_g, Z^g, a period lattice Lambda = Z^2g, or the genus-g surface
/// group. Generator order: B_1..B_g for F_g and Z^g; lambda_1..lambda_2g for
/// a lattice; a_1..a_g, b_1..b_g for a surface group.
///
/// A lattice may be unbound (no period matrix attached yet); two lattice
/// specs are compatible when either side is unbound.
class GroupSpec {
 public:
  using Period = std::variant<std::monostate, ExactMatrix, ApproxMatrix>;

  static GroupSpec free(std::size_t g) { return GroupSpec(GroupKind::Free, g); }
  static GroupSpec free_abelian(std::size_t g) { return GroupSpec(GroupKind::FreeAbelian, g); }
  static GroupSpec surface(std::size_t g) { return GroupSpec(GroupKind::Surface, g); }
  static GroupSpec lattice_unbound(std::size_t g) { return GroupSpec(GroupKind::Lattice, g); }

  template <Scalar S>
  static GroupSpec lattice(const Matrix<S>& period, const Tolerance& tol = Tolerance{}) {
    if (!period.is_square() || period.rows() == 0)
      fail(ErrorCode::InvalidGroup, "period matrix must be g x g with g >= 1, got " + period.shape());
    if (!near_equal(period, period.transpose(), tol)) fail(ErrorCode::InvalidGroup, "period matrix is not symmetric");
    if (rank(period, tol) != period.rows()) fail(ErrorCode::InvalidGroup, "period matrix is not invertible");
    GroupSpec spec(GroupKind::Lattice, period.rows());
    spec.period_ = period;
    return spec;
  }

  GroupKind kind() const { return kind_; }
  std::size_t g() const { return g_; }
  const Period& period() const { return period_; }
  bool has_period() const { return !std::holds_alternative<std::monostate>(period_); }

  std::size_t generator_count() const {
    return kind_ == GroupKind::Lattice || kind_ == GroupKind::Surface ? 2 * g_ : g_;
  }
  bool is_abelian() const { return kind_ == GroupKind::FreeAbelian || kind_ == GroupKind::Lattice; }

  std::string generator_name(std::size_t k) const {
    switch (kind_) {
      case GroupKind::Free:
      case GroupKind::FreeAbelian: return "B" + std::to_string(k + 1);
      case GroupKind::Lattice: return "L" + std::to_string(k + 1);
      case GroupKind::Surface: return (k < g_ ? "a" : "b") + std::to_string(k % g_ + 1);
    }
    return "?";
  }

  std::string describe() const {
    std::string s = std::string(kind_name(kind_)) + "(" + std::to_string(g_) + ")";
    if (kind_ == GroupKind::Lattice && !has_period()) s += "[unbound]";
    return s;
  }

  /// Coordinates of the lattice generators from Pi = (Z, I): row k < g is
  /// Z's row k, row g + j is e_j.
  template <Scalar S>
  Matrix<S> lattice_coordinates() const {
    if (kind_ != GroupKind::Lattice || !has_period())
      fail(ErrorCode::InvalidGroup, "coordinates need a lattice with a period matrix");
    Matrix<S> z = period_as<S>();
    Matrix<S> coords(2 * g_, g_);
    coords.set_block(0, 0, z);
    coords.set_block(g_, 0, Matrix<S>::identity(g_));
    return coords;
  }

  template <Scalar S>
  Matrix<S> period_as() const {
    if (const auto* z = std::get_if<Matrix<S>>(&period_)) return *z;
    if constexpr (!ScalarTraits<S>::exact) {
      if (const auto* z = std::get_if<ExactMatrix>(&period_)) return z->template cast<ApproxComplex>();
    }
    fail(ErrorCode::BackendMismatch, "period matrix is not available on the " + std::string(ScalarTraits<S>::name) + " backend");
  }

  /// Same kind and rank; periods compared only when both are bound.
  friend bool compatible(const GroupSpec& a, const GroupSpec& b) {
    if (a.kind_ != b.kind_ || a.g_ != b.g_) return false;
    if (!a.has_period() || !b.has_period()) return true;
    if (a.period_.index() == b.period_.index()) return a.period_ == b.period_;
    return near_equal(a.period_as<ApproxComplex>(), b.period_as<ApproxComplex>());
  }

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.kind_ == b.kind_ && a.g_ == b.g_ && a.period_ == b.period_;
  }

 private:
  GroupSpec(GroupKind kind, std::size_t g) : kind_(kind), g_(g) {
    if (g == 0) fail(ErrorCode::InvalidGroup, "rank/genus must be at least 1");
  }

  GroupKind kind_;
  std::size_t g_;
  Period period_;
};

inline void require_compatible(const GroupSpec& a, const GroupSpec& b) {
  if (!compatible(a, b)) fail(ErrorCode::GroupMismatch, a.describe() + " vs " + b.describe());
}

// ---------------------------------------------------------------------------
// Words

struct Letter {
  std::size_t generator;
  long exponent;
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Normal-form group element: a freely reduced sequence of generator powers
/// (free and surface groups) or an exponent vector (abelian groups).
class Word {
 public:
  static Word free(const std::vector<Letter>& letters) {
    Word w;
    w.abelian_ = false;
    for (const auto& l : letters) w.push(l);
    return w;
  }
  static Word abelian(std::vector<long> exponents) {
    Word w;
    w.abelian_ = true;
    w.exponents_ = std::move(exponents);
    return w;
  }
  static Word identity_in(const GroupSpec& group) {
    return group.is_abelian() ? abelian(std::vector<long>(group.generator_count(), 0)) : free({});
  }
  static Word generator_in(const GroupSpec& group, std::size_t k, long exponent = 1) {
    if (k >= group.generator_count())
      fail(ErrorCode::GeneratorOutOfRange, "generator " + std::to_string(k + 1) + " in " + group.describe());
    if (!group.is_abelian()) return free({{k, exponent}});
    std::vector<long> e(group.generator_count(), 0);
    e[k] = exponent;
    return abelian(std::move(e));
  }

  bool is_abelian() const { return abelian_; }
  const std::vector<Letter>& letters() const { return letters_; }
  const std::vector<long>& exponents() const { return exponents_; }

  bool is_identity() const {
    if (abelian_)
      return std::all_of(exponents_.begin(), exponents_.end(), [](long e) { return e == 0; });
    return letters_.empty();
  }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  void push(Letter l) {
    if (l.exponent == 0) return;
    if (!letters_.empty() && letters_.back().generator == l.generator) {
      letters_.back().exponent += l.exponent;
      if (letters_.back().exponent == 0) letters_.pop_back();
      return;
    }
    letters_.push_back(l);
  }

  bool abelian_ = false;
  std::vector<Letter> letters_;
  std::vector<long> exponents_;
};

/// Normal form of w as an element of `group`; free words are abelianized
/// when the group is abelian.
inline Word normalize(const GroupSpec& group, const Word& w) {
  const std::size_t n = group.generator_count();
  if (w.is_abelian()) {
    if (!group.is_abelian())
      fail(ErrorCode::GeneratorOutOfRange, "exponent vector given for non-abelian " + group.describe());
    if (w.exponents().size() != n)
      fail(ErrorCode::GeneratorOutOfRange, "exponent vector of length " + std::to_string(w.exponents().size()) + " for " + group.describe());
    return w;
  }
  for (const auto& l : w.letters())
    if (l.generator >= n)
      fail(ErrorCode::GeneratorOutOfRange, "generator " + std::to_string(l.generator + 1) + " in " + group.describe());
  if (!group.is_abelian()) return Word::free(w.letters());
  std::vector<long> e(n, 0);
  for (const auto& l : w.letters()) e[l.generator] += l.exponent;
  return Word::abelian(std::move(e));
}

inline Word compose_words(const Word& a, const Word& b) {
  if (a.is_abelian() != b.is_abelian()) fail(ErrorCode::GroupMismatch, "cannot compose abelian and free words");
  if (a.is_abelian()) {
    if (a.exponents().size() != b.exponents().size()) fail(ErrorCode::GroupMismatch, "exponent vectors of different length");
    std::vector<long> e = a.exponents();
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += b.exponents()[k];
    return Word::abelian(std::move(e));
  }
  std::vector<Letter> l = a.letters();
  l.insert(l.end(), b.letters().begin(), b.letters().end());
  return Word::free(l);
}

inline Word invert_word(const Word& w) {
  if (w.is_abelian()) {
    std::vector<long> e = w.exponents();
    for (auto& x : e) x = -x;
    return Word::abelian(std::move(e));
  }
  std::vector<Letter> l(w.letters().rbegin(), w.letters().rend());
  for (auto& x : l) x.exponent = -x.exponent;
  return Word::free(l);
}

inline Word power_word(const Word& w, long exponent) {
  if (w.is_abelian()) {
    std::vector<long> e = w.exponents();
    for (auto& x : e) x *= exponent;
    return Word::abelian(std::move(e));
  }
  Word base = exponent < 0 ? invert_word(w) : w;
  Word out = Word::free({});
  for (long k = 0; k < std::labs(exponent); ++k) out = compose_words(out, base);
  return out;
}

/// The single surface relation prod_i a_i b_i a_i^-1 b_i^-1.
inline Word surface_relation(std::size_t g) {
  std::vector<Letter> l;
  for (std::size_t i = 0; i < g; ++i) {
    l.push_back({i, 1});
    l.push_back({g + i, 1});
    l.push_back({i, -1});
    l.push_back({g + i, -1});
  }
  return Word::free(l);
}

// ---------------------------------------------------------------------------
// Morphisms

struct Morphism {
  GroupSpec source;
  GroupSpec target;
  std::vector<Word> images;  // one per source generator, normal form in target
};

inline Word apply(const Morphism& m, const Word& w) {
  Word src = normalize(m.source, w);
  Word out = Word::identity_in(m.target);
  if (src.is_abelian()) {
    for (std::size_t k = 0; k < src.exponents().size(); ++k)
      if (src.exponents()[k] != 0) out = compose_words(out, power_word(m.images[k], src.exponents()[k]));
  } else {
    for (const auto& l : src.letters()) out = compose_words(out, power_word(m.images[l.generator], l.exponent));
  }
  return out;
}

/// Checks image shapes and, for surface-group sources, that the relation
/// maps to the identity.
inline void check_morphism(const Morphism& m) {
  if (m.images.size() != m.source.generator_count())
    fail(ErrorCode::ShapeMismatch, "morphism needs " + std::to_string(m.source.generator_count()) + " images");
  for (const auto& img : m.images) {
    if (normalize(m.target, img) != img) fail(ErrorCode::InvalidGroup, "morphism image is not a normal form in the target");
  }
  if (m.source.kind() == GroupKind::Surface && !apply(m, surface_relation(m.source.g())).is_identity())
    fail(ErrorCode::SurfaceRelationViolated, "image of the surface relation is not trivial");
}

/// Lambda -> Z^g with lambda_i -> B_i and lambda_{g+i} -> 0.
inline Morphism alpha_torus(const GroupSpec& lattice) {
  if (lattice.kind() != GroupKind::Lattice) fail(ErrorCode::InvalidGroup, "alpha_torus needs a lattice source");
  const std::size_t g = lattice.g();
  Morphism m{lattice, GroupSpec::free_abelian(g), {}};
  for (std::size_t k = 0; k < 2 * g; ++k)
    m.images.push_back(k < g ? Word::generator_in(m.target, k) : Word::identity_in(m.target));
  return m;
}

inline Morphism alpha_torus(std::size_t g) { return alpha_torus(GroupSpec::lattice_unbound(g)); }

/// pi_1(surface) -> F_g with a_i -> 1 and b_i -> B_i.
inline Morphism alpha_surface(std::size_t g) {
  Morphism m{GroupSpec::surface(g), GroupSpec::free(g), {}};
  for (std::size_t k = 0; k < 2 * g; ++k)
    m.images.push_back(k < g ? Word::identity_in(m.target) : Word::generator_in(m.target, k - g));
  check_morphism(m);
  return m;
}

/// The canonical alpha for a lattice or surface group.
inline Morphism canonical_alpha(const GroupSpec& group) {
  switch (group.kind()) {
    case GroupKind::Lattice: return alpha_torus(group);
    case GroupKind::Surface: return alpha_surface(group.g());
    default: fail(ErrorCode::InvalidGroup, "no canonical alpha for " + group.describe());
  }
}

// ---------------------------------------------------------------------------
// Text form: "B1^2*B2^-1" (letters B, L, a, b), "1" for the identity, and
// "[2,-1]" for exponent vectors.

inline Word parse_word(const GroupSpec& group, std::string_view text) {
  auto bad = [&](const std::string& why) { fail(ErrorCode::Parse, "word '" + std::string(text) + "': " + why); };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty() || s == "1" || s == "e") return Word::identity_in(group);
  if (s.front() == '[') {
    if (s.back() != ']') bad("unterminated exponent vector");
    std::vector<long> e;
    std::string body = s.substr(1, s.size() - 2);
    std::size_t pos = 0;
    while (!body.empty() && pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      std::string item = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        e.push_back(std::stol(item, &used));
        if (used != item.size()) bad("bad exponent '" + item + "'");
      } catch (const std::logic_error&) {
        bad("bad exponent '" + item + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return normalize(group, Word::abelian(std::move(e)));
  }
  std::vector<Letter> letters;
  std::size_t pos = 0;
  while (pos < s.size()) {
    char name = s[pos++];
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) bad("missing generator index");
    std::size_t index = std::stoul(s.substr(start, pos - start));
    if (index == 0) bad("generator indices start at 1");
    std::size_t gen = 0;
    switch (name) {
      case 'B':
      case 'L': gen = index - 1; break;
      case 'a':
        if (group.kind() != GroupKind::Surface) bad("'a' letters need a surface group");
        gen = index - 1;
        if (index > group.g()) bad("generator out of range");
        break;
      case 'b':
        if (group.kind() != GroupKind::Surface) bad("'b' letters need a surface group");
        if (index > group.g()) bad("generator out of range");
        gen = group.g() + index - 1;
        break;
      default: bad(std::string("unknown generator letter '") + name + "'");
    }
    long exponent = 1;
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      std::size_t e0 = pos;
      if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      try {
        exponent = std::stol(s.substr(e0, pos - e0));
      } catch (const std::logic_error&) {
        bad("bad exponent");
      }
    }
    letters.push_back({gen, exponent});
    if (pos < s.size()) {
      if (s[pos] != '*') bad("expected '*'");
      ++pos;
      if (pos == s.size()) bad("trailing '*'");
    }
  }
  return normalize(group, Word::free(letters));
}

inline std::string format_word(const GroupSpec& group, const Word& w) {
  if (w.is_abelian()) {
    std::string s = "[";
    for (std::size_t k = 0; k < w.exponents().size(); ++k) s += (k ? "," : "") + std::to_string(w.exponents()[k]);
    return s + "]";
  }
  if (w.letters().empty()) return "1";
  std::string s;
  for (const auto& l : w.letters()) {
    if (!s.empty()) s += "*";
    s += group.generator_name(l.generator);
    if (l.exponent != 1) s += "^" + std::to_string(l.exponent);
  }
  return s;
}

}  // namespace schottky
