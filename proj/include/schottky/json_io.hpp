#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "schottky/cohomology.hpp"
#include "schottky/schottky.hpp"

// JSON encodings. Scalars are strings in the numerics text form; matrices
// are arrays of rows; representations are
//   { "group": {"kind": ..., "g": n, "period": matrix?}, "images": [matrix, ...] }.

namespace schottky::io {

using nlohmann::json;

template <Scalar S>
json to_json(const S& x) {
  return to_string(x);
}

template <Scalar S>
S scalar_from_json(const json& j) {
  if (j.is_string()) return parse_scalar<S>(j.get<std::string>());
  if (j.is_number_integer()) return S(j.get<long>());
  if constexpr (!ScalarTraits<S>::exact) {
    if (j.is_number()) return S(j.get<double>());
  }
  fail(ErrorCode::Parse, "scalar must be a string, got " + j.dump());
}

template <Scalar S>
json to_json(const Vector<S>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

template <Scalar S>
Vector<S> vector_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::Parse, "vector must be an array");
  Vector<S> v;
  for (const auto& x : j) v.push_back(scalar_from_json<S>(x));
  return v;
}

template <Scalar S>
json to_json(const Matrix<S>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

/// Rows of equal length; [] is the 0x0 matrix.
template <Scalar S>
Matrix<S> matrix_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::Parse, "matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : (j[0].is_array() ? j[0].size() : 0);
  std::vector<S> data;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) fail(ErrorCode::Parse, "matrix rows must be arrays of equal length");
    for (const auto& x : row) data.push_back(scalar_from_json<S>(x));
  }
  return Matrix<S>(rows, cols, std::move(data));
}

inline json to_json(const GroupSpec& group) {
  json out{{"kind", kind_name(group.kind())}, {"g", group.g()}};
  if (const auto* z = std::get_if<ExactMatrix>(&group.period())) out["period"] = to_json(*z);
  if (const auto* z = std::get_if<ApproxMatrix>(&group.period())) {
    out["period"] = to_json(*z);
    out["backend"] = "approx";
  }
  return out;
}

inline GroupKind kind_from_string(const std::string& s) {
  if (s == "FreeGroup" || s == "F") return GroupKind::Free;
  if (s == "FreeAbelian" || s == "Z") return GroupKind::FreeAbelian;
  if (s == "Lattice") return GroupKind::Lattice;
  if (s == "SurfaceGroup" || s == "Surface") return GroupKind::Surface;
  fail(ErrorCode::Parse, "unknown group kind '" + s + "'");
}

/// A lattice period is read exactly when every entry is an exact scalar
/// and approximately otherwise (or when "backend" says "approx").
inline GroupSpec group_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("g")) fail(ErrorCode::Parse, "group needs \"kind\" and \"g\"");
  GroupKind kind = kind_from_string(j.at("kind").get<std::string>());
  if (!j.at("g").is_number_integer() || j.at("g").get<long>() < 1) fail(ErrorCode::Parse, "\"g\" must be a positive integer");
  auto g = j.at("g").get<std::size_t>();
  switch (kind) {
    case GroupKind::Free: return GroupSpec::free(g);
    case GroupKind::FreeAbelian: return GroupSpec::free_abelian(g);
    case GroupKind::Surface: return GroupSpec::surface(g);
    case GroupKind::Lattice: break;
  }
  if (!j.contains("period") || j.at("period").is_null()) return GroupSpec::lattice_unbound(g);
  GroupSpec spec = GroupSpec::lattice_unbound(g);
  bool approx = j.value("backend", std::string("exact")) == "approx";
  if (!approx) {
    try {
      spec = GroupSpec::lattice(matrix_from_json<GaussianRational>(j.at("period")));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Parse) throw;
      approx = true;
    }
  }
  if (approx) spec = GroupSpec::lattice(matrix_from_json<ApproxComplex>(j.at("period")));
  if (spec.g() != g) fail(ErrorCode::InvalidGroup, "period matrix size does not match g");
  return spec;
}

template <Scalar S>
json to_json(const Representation<S>& rho) {
  json images = json::array();
  for (const auto& m : rho.images) images.push_back(to_json(m));
  return json{{"group", to_json(rho.group)}, {"rank", rho.rank}, {"images", std::move(images)}};
}

/// "rank" is optional (taken from the first image); {"trivial": r} with a
/// group builds the trivial representation. If the object has no group,
/// `fallback` is used.
template <Scalar S>
Representation<S> rep_from_json(const json& j, const std::optional<GroupSpec>& fallback = std::nullopt) {
  if (!j.is_object()) fail(ErrorCode::Parse, "representation must be an object");
  std::optional<GroupSpec> group;
  if (j.contains("group")) group = group_from_json(j.at("group"));
  if (fallback) {
    if (group && !compatible(*group, *fallback))
      fail(ErrorCode::GroupMismatch, "representation is over " + group->describe() + ", expected " + fallback->describe());
    if (!group || (!group->has_period() && fallback->has_period())) group = fallback;
  }
  if (!group) fail(ErrorCode::Parse, "representation has no group");
  if (j.contains("trivial")) return Representation<S>::trivial(*group, j.at("trivial").get<std::size_t>());
  if (!j.contains("images") || !j.at("images").is_array()) fail(ErrorCode::Parse, "representation needs \"images\"");
  Representation<S> rho{*group, 0, {}};
  for (const auto& m : j.at("images")) rho.images.push_back(matrix_from_json<S>(m));
  if (j.contains("rank"))
    rho.rank = j.at("rank").get<std::size_t>();
  else if (!rho.images.empty())
    rho.rank = rho.images.front().rows();
  return rho;
}

template <Scalar S>
json to_json(const Cocycle<S>& c) {
  json values = json::array();
  for (const auto& v : c.values) values.push_back(to_json(v));
  return json{{"coefficients", to_json(c.coefficients)}, {"values", std::move(values)}};
}

template <Scalar S>
Cocycle<S> cocycle_from_json(const json& j, const std::optional<Representation<S>>& coefficients = std::nullopt) {
  if (!j.is_object() || !j.contains("values")) fail(ErrorCode::Parse, "cocycle needs \"values\"");
  auto coeffs = [&]() -> Representation<S> {
    if (j.contains("coefficients")) {
      auto own = rep_from_json<S>(j.at("coefficients"));
      if (coefficients && !(own.images == coefficients->images && compatible(own.group, coefficients->group)))
        fail(ErrorCode::CoefficientMismatch, "cocycle coefficients differ from the expected module");
      return own;
    }
    if (coefficients) return *coefficients;
    fail(ErrorCode::Parse, "cocycle has no coefficients");
  }();
  Cocycle<S> c{std::move(coeffs), {}};
  for (const auto& v : j.at("values")) c.values.push_back(vector_from_json<S>(v));
  return c;
}

template <Scalar S>
json to_json(const SchottkyGauge<S>& gauge) {
  json a = json::array();
  for (const auto& m : gauge.coefficients) a.push_back(to_json(m));
  return json{{"A", std::move(a)}, {"backend", SchottkyGauge<S>::backend}};
}

template <Scalar S>
SchottkyGauge<S> gauge_from_json(const json& j) {
  if (!j.is_object() || !j.contains("A")) fail(ErrorCode::Parse, "gauge needs \"A\"");
  SchottkyGauge<S> gauge;
  for (const auto& m : j.at("A")) gauge.coefficients.push_back(matrix_from_json<S>(m));
  return gauge;
}

template <Scalar S>
json to_json(const TorusData<S>& torus) {
  return json{{"g", torus.g}, {"Z", to_json(torus.period)}, {"backend", ScalarTraits<S>::name}};
}

inline std::string torus_backend(const json& j) { return j.value("backend", std::string("exact")); }

template <Scalar S>
TorusData<S> torus_from_json(const json& j, const Tolerance& tol = Tolerance{}) {
  if (!j.is_object() || !j.contains("Z")) fail(ErrorCode::Parse, "torus needs \"Z\"");
  auto torus = make_torus(matrix_from_json<S>(j.at("Z")), tol);
  if (j.contains("g") && j.at("g").get<std::size_t>() != torus.g) fail(ErrorCode::InvalidGroup, "\"g\" does not match Z");
  return torus;
}

}  // namespace schottky::io
