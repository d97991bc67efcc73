#pragma once

// JSON readers and writers for problem files and reports. Needs nlohmann/json.
//
// Scalars on finite spaces are exact: strings are parsed as rationals ("8/15",
// "0.25", "1e-3") and JSON numbers are rounded to nine decimal places. Rational
// results are written back as strings, doubles as shortest round-trip numbers.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmsfp/contractions.hpp"
#include "gmsfp/control.hpp"
#include "gmsfp/dynprog.hpp"
#include "gmsfp/errors.hpp"
#include "gmsfp/gms.hpp"
#include "gmsfp/iteration.hpp"
#include "gmsfp/mapping.hpp"
#include "gmsfp/rational.hpp"
#include "gmsfp/space.hpp"

namespace gmsfp::io {

using json = nlohmann::ordered_json;

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedInput(path.string() + ": " + e.what());
  }
}

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw MalformedInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// Scalars

template <class Scalar>
Scalar scalar_from_json(const json& j);

template <>
inline Rational scalar_from_json<Rational>(const json& j) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number()) return scalar_traits<Rational>::from_double(j.get<double>());
  } catch (const std::invalid_argument& e) {
    throw MalformedInput(e.what());
  } catch (const std::overflow_error& e) {
    throw MalformedInput(e.what());
  }
  throw MalformedInput("expected a number or a rational string, got " + j.dump());
}

template <>
inline double scalar_from_json<double>(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>()).to_double();
    } catch (const std::exception& e) {
      throw MalformedInput(e.what());
    }
  }
  throw MalformedInput("expected a number, got " + j.dump());
}

inline json to_json_scalar(const Rational& r) { return r.to_string(); }
inline json to_json_scalar(double d) { return d; }

template <class Scalar>
Scalar scalar_field(const json& j, const char* key, Scalar fallback) {
  return j.contains(key) ? scalar_from_json<Scalar>(j.at(key)) : fallback;
}

// ---------------------------------------------------------------------------
// Spaces

inline FiniteGMS<Rational> gms_from_json(const json& j) {
  const auto& pts = require(j, "points");
  const auto& dist = require(j, "dist");
  if (!pts.is_array() || !dist.is_array()) throw MalformedTable("'points' and 'dist' must be arrays");
  std::vector<std::string> labels;
  for (const auto& p : pts) labels.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  std::vector<std::vector<Rational>> rows;
  for (const auto& row : dist) {
    if (!row.is_array()) throw MalformedTable("'dist' rows must be arrays");
    std::vector<Rational> r;
    for (const auto& v : row) {
      try {
        r.push_back(scalar_from_json<Rational>(v));
      } catch (const MalformedInput& e) {
        throw MalformedTable(e.what());
      }
    }
    rows.push_back(std::move(r));
  }
  return FiniteGMS<Rational>(std::move(labels), std::move(rows));
}

inline json gms_to_json(const FiniteGMS<Rational>& s) {
  json rows = json::array();
  for (const auto& row : s.table()) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v.to_string());
    rows.push_back(std::move(r));
  }
  return {{"points", s.labels()}, {"dist", std::move(rows)}};
}

/// A non-negative JSON integer, whichever signedness the parser stored.
inline bool is_index(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

inline SampledIntervalSpace interval_from_json(const json& j) {
  const auto& iv = require(j, "interval");
  const auto count = require(iv, "grid_count");
  if (!is_index(count)) throw MalformedInput("grid_count must be a positive integer");
  try {
    return SampledIntervalSpace(scalar_from_json<double>(require(iv, "lower")),
                                scalar_from_json<double>(require(iv, "upper")), count.get<std::size_t>());
  } catch (const std::invalid_argument& e) {
    throw MalformedInput(e.what());
  }
}

inline json interval_to_json(const SampledIntervalSpace& s) {
  return {{"interval", {{"lower", s.lower()}, {"upper", s.upper()}, {"grid_count", s.size()}}}};
}

using AnySpace = std::variant<FiniteGMS<Rational>, SampledIntervalSpace>;

/// A space given inline, as an interval description, or as a path to a space file
/// (relative to base_dir).
inline AnySpace space_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  if (j.is_string()) return space_from_json(read_json_file(base_dir / j.get<std::string>()), base_dir);
  if (j.is_object() && j.contains("interval")) return interval_from_json(j);
  return gms_from_json(j);
}

// ---------------------------------------------------------------------------
// Points

inline std::size_t point_from_json(const FiniteGMS<Rational>& s, const json& j) {
  if (j.is_string()) return s.find(j.get<std::string>());
  if (j.is_number()) return s.find(j.dump());
  throw MalformedInput("expected a point label, got " + j.dump());
}

inline double point_from_json(const SampledIntervalSpace& s, const json& j) {
  const double x = scalar_from_json<double>(j);
  if (!s.contains(x)) throw UnknownPoint("point " + j.dump() + " lies outside the interval");
  return x;
}

inline std::size_t parse_point(const FiniteGMS<Rational>& s, const std::string& text) { return s.find(text); }

inline double parse_point(const SampledIntervalSpace& s, const std::string& text) {
  return point_from_json(s, json(text));
}

template <class Scalar>
json point_to_json(const FiniteGMS<Scalar>& s, std::size_t p) {
  return s.label(p);
}
inline json point_to_json(const SampledIntervalSpace&, double x) { return x; }

inline json functional_to_json(const std::vector<std::string>& states, const BoundedFunctional& f) {
  json o = json::object();
  for (std::size_t i = 0; i < f.size(); ++i) o[states.at(i)] = f[i];
  return o;
}
inline json point_to_json(const FunctionalSpace&, const BoundedFunctional& f) { return f.values; }

// ---------------------------------------------------------------------------
// Maps and control functions

inline CatalogMap catalog_from_json(const json& j) {
  const std::string kind = j.is_string() ? j.get<std::string>() : require(j, "kind").get<std::string>();
  if (kind == "identity") return CatalogMap::identity();
  if (kind == "halving") return CatalogMap::halving();
  if (kind == "constant") {
    const auto& v = require(j, "value");
    if (v.is_string()) {
      auto m = CatalogMap::constant(scalar_from_json<double>(v));
      m.point_label = v.get<std::string>();
      return m;
    }
    return CatalogMap::constant(scalar_from_json<double>(v));
  }
  if (kind == "affine")
    return CatalogMap::affine(scalar_from_json<double>(require(j, "a")), scalar_from_json<double>(require(j, "b")));
  throw MalformedInput("unknown map kind '" + kind + "'");
}

inline json catalog_to_json(const CatalogMap& m) {
  switch (m.kind) {
    case CatalogMap::Kind::identity:
      return {{"kind", "identity"}};
    case CatalogMap::Kind::halving:
      return {{"kind", "halving"}};
    case CatalogMap::Kind::constant:
      if (m.point_label) return {{"kind", "constant"}, {"value", *m.point_label}};
      return {{"kind", "constant"}, {"value", m.b}};
    case CatalogMap::Kind::affine:
      return {{"kind", "affine"}, {"a", m.a}, {"b", m.b}};
  }
  return {};
}

/// Index table of a map on a finite space: {"table": {"x": "Ax", ...}},
/// {"table": ["A p0", "A p1", ...]}, or a catalog entry.
inline std::vector<std::size_t> finite_map_from_json(const FiniteGMS<Rational>& s, const json& j) {
  if (j.is_object() && j.contains("table")) {
    const auto& t = j.at("table");
    std::vector<std::optional<std::size_t>> img(s.size());
    if (t.is_array()) {
      if (t.size() != s.size()) throw MalformedInput("map table must list one image per point");
      for (std::size_t i = 0; i < s.size(); ++i) img[i] = point_from_json(s, t[i]);
    } else if (t.is_object()) {
      for (const auto& [k, v] : t.items()) img[s.find(k)] = point_from_json(s, v);
    } else {
      throw MalformedInput("map table must be an array or an object");
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!img[i]) throw MalformedInput("map table has no image for " + s.label(i));
      out.push_back(*img[i]);
    }
    return out;
  }
  return catalog_table(s, catalog_from_json(j));
}

template <class Scalar>
ControlFunction<Scalar> control_from_json(const json& j) {
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "scale") return ControlFunction<Scalar>::scale(scalar_from_json<Scalar>(require(j, "k")));
  if (kind == "identity") return ControlFunction<Scalar>::scale(scalar_traits<Scalar>::one());
  if (kind == "saturating") return ControlFunction<Scalar>::saturating();
  if (kind == "capped")
    return ControlFunction<Scalar>::capped(scalar_from_json<Scalar>(require(j, "k")),
                                           scalar_from_json<Scalar>(require(j, "cap")));
  if (kind == "table") {
    std::vector<Scalar> knots, values;
    for (const auto& v : require(j, "knots")) knots.push_back(scalar_from_json<Scalar>(v));
    for (const auto& v : require(j, "values")) values.push_back(scalar_from_json<Scalar>(v));
    return ControlFunction<Scalar>::table(std::move(knots), std::move(values));
  }
  throw MalformedInput("unknown control kind '" + kind + "'");
}

template <class Scalar>
json control_to_json(const ControlFunction<Scalar>& f) {
  switch (f.kind()) {
    case ControlKind::scale:
      return {{"kind", "scale"}, {"k", to_json_scalar(f.k())}};
    case ControlKind::saturating:
      return {{"kind", "saturating"}};
    case ControlKind::capped:
      return {{"kind", "capped"}, {"k", to_json_scalar(f.k())}, {"cap", to_json_scalar(f.cap())}};
    case ControlKind::table: {
      json k = json::array(), v = json::array();
      for (const auto& x : f.knots()) k.push_back(to_json_scalar(x));
      for (const auto& x : f.values()) v.push_back(to_json_scalar(x));
      return {{"kind", "table"}, {"knots", k}, {"values", v}};
    }
  }
  return {};
}

template <class S>
PairWeight<typename S::point_type, typename S::scalar_type> beta_from_json(const S& space, const json& j) {
  using Scalar = typename S::scalar_type;
  using W = PairWeight<typename S::point_type, Scalar>;
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "constant") return W::constant(scalar_from_json<Scalar>(require(j, "value")));
  if (kind == "order")
    return W::order(scalar_from_json<Scalar>(require(j, "if_geq")), scalar_from_json<Scalar>(require(j, "otherwise")));
  if (kind == "table") {
    if constexpr (std::is_same_v<typename S::point_type, std::size_t>) {
      std::vector<std::vector<Scalar>> rows;
      for (const auto& row : require(j, "values")) {
        std::vector<Scalar> r;
        for (const auto& v : row) r.push_back(scalar_from_json<Scalar>(v));
        if (r.size() != space.size()) throw MalformedInput("beta table must be square over the points");
        rows.push_back(std::move(r));
      }
      if (rows.size() != space.size()) throw MalformedInput("beta table must be square over the points");
      return W::table(std::move(rows));
    } else {
      throw MalformedInput("beta tables need a finite space");
    }
  }
  throw MalformedInput("unknown beta kind '" + kind + "'");
}

inline PairScan scan_from_json(const json& j) {
  PairScan s;
  if (!j.is_object()) return s;
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "exhaustive")
      s.mode = PairScan::Mode::exhaustive;
    else if (m == "sampled")
      s.mode = PairScan::Mode::sampled;
    else if (m == "auto")
      s.mode = PairScan::Mode::automatic;
    else
      throw MalformedInput("unknown scan mode '" + m + "'");
  }
  if (j.contains("samples")) s.sample_count = j.at("samples").get<std::uint64_t>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("max_listed")) s.max_listed = j.at("max_listed").get<std::size_t>();
  return s;
}

// ---------------------------------------------------------------------------
// Map problems: a space, a pair of maps, and control data.

template <class S>
struct MapProblem {
  S space;
  MappingPair<typename S::point_type> pair;
  ControlFunctions<typename S::point_type, typename S::scalar_type> ctrl;
  std::optional<typename S::point_type> x0;
  std::optional<ContractionKind> condition;
  PairScan scan;
};

using AnyProblem = std::variant<MapProblem<FiniteGMS<Rational>>, MapProblem<SampledIntervalSpace>>;

inline ContractionKind condition_from_string(const std::string& s) {
  if (s == "phi" || s == "3") return ContractionKind::phi;
  if (s == "linear" || s == "17") return ContractionKind::linear;
  if (s == "weighted" || s == "18") return ContractionKind::weighted;
  throw MalformedInput("unknown condition '" + s + "' (expected phi|linear|weighted or 3|17|18)");
}

namespace detail {

template <class S>
void fill_controls(MapProblem<S>& p, const json& j) {
  using Scalar = typename S::scalar_type;
  if (j.contains("phi")) p.ctrl.phi = control_from_json<Scalar>(j.at("phi"));
  if (j.contains("psi")) p.ctrl.psi = control_from_json<Scalar>(j.at("psi"));
  if (j.contains("beta")) p.ctrl.beta = beta_from_json(p.space, j.at("beta"));
  auto& c = p.ctrl.constants;
  c.C = scalar_field<Scalar>(j, "C", Scalar{});
  c.L = scalar_field<Scalar>(j, "L", Scalar{});
  c.a1 = scalar_field<Scalar>(j, "a1", Scalar{});
  c.a2 = scalar_field<Scalar>(j, "a2", Scalar{});
  c.a3 = scalar_field<Scalar>(j, "a3", Scalar{});
  if (j.contains("scan")) p.scan = scan_from_json(j.at("scan"));
  if (j.contains("condition")) {
    const auto& c2 = j.at("condition");
    p.condition = condition_from_string(c2.is_string() ? c2.get<std::string>() : c2.dump());
  }
  if (j.contains("x0")) p.x0 = point_from_json(p.space, j.at("x0"));
}

}  // namespace detail

inline AnyProblem problem_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  auto space = space_from_json(require(j, "space"), base_dir);
  const json b_spec = j.contains("B") ? j.at("B") : json("identity");
  if (auto* fin = std::get_if<FiniteGMS<Rational>>(&space)) {
    MapProblem<FiniteGMS<Rational>> p{std::move(*fin), {}, {}, {}, {}, {}};
    auto a = finite_map_from_json(p.space, require(j, "A"));
    auto b = finite_map_from_json(p.space, b_spec);
    std::optional<std::map<std::size_t, std::size_t>> sel;
    if (j.contains("selector")) {
      sel.emplace();
      for (const auto& [y, x] : j.at("selector").items()) (*sel)[p.space.find(y)] = point_from_json(p.space, x);
    }
    p.pair = make_finite_pair(p.space, std::move(a), std::move(b), std::move(sel));
    detail::fill_controls(p, j);
    return p;
  }
  auto& iv = std::get<SampledIntervalSpace>(space);
  MapProblem<SampledIntervalSpace> p{iv, make_interval_pair(iv, catalog_from_json(require(j, "A")),
                                                            catalog_from_json(b_spec)),
                                     {}, {}, {}, {}};
  detail::fill_controls(p, j);
  return p;
}

// ---------------------------------------------------------------------------
// Reports

template <class Scalar>
json validation_report_to_json(const FiniteGMS<Scalar>& s, const ValidationReport<Scalar>& r) {
  auto list = [&](const std::vector<AxiomViolation<Scalar>>& vs) {
    json out = json::array();
    for (const auto& v : vs) {
      json w = json::array();
      for (auto i : v.witness) w.push_back(s.label(i));
      out.push_back({{"axiom", v.axiom}, {"witness", w}, {"lhs", to_json_scalar(v.lhs)}, {"rhs", to_json_scalar(v.rhs)}});
    }
    return out;
  };
  return {{"report", "validate-gms"},
          {"valid_gms", r.valid_gms},
          {"is_metric", r.is_metric()},
          {"exhaustive", r.exhaustive},
          {"points", s.size()},
          {"quadruples_checked", r.quadruples_checked},
          {"triples_checked", r.triples_checked},
          {"violation_count", r.violation_count},
          {"triangle_violation_count", r.triangle_violation_count},
          {"violations", list(r.violations)},
          {"triangle_violations", list(r.triangle_violations)}};
}

inline ValidationReport<Rational> validation_report_from_json(const FiniteGMS<Rational>& s, const json& j) {
  ValidationReport<Rational> r;
  r.valid_gms = require(j, "valid_gms").get<bool>();
  r.exhaustive = require(j, "exhaustive").get<bool>();
  r.quadruples_checked = require(j, "quadruples_checked").get<std::uint64_t>();
  r.triples_checked = require(j, "triples_checked").get<std::uint64_t>();
  r.violation_count = require(j, "violation_count").get<std::uint64_t>();
  r.triangle_violation_count = require(j, "triangle_violation_count").get<std::uint64_t>();
  auto list = [&](const json& arr) {
    std::vector<AxiomViolation<Rational>> out;
    for (const auto& v : arr) {
      AxiomViolation<Rational> a;
      a.axiom = require(v, "axiom").get<std::string>();
      for (const auto& w : require(v, "witness")) a.witness.push_back(point_from_json(s, w));
      a.lhs = scalar_from_json<Rational>(require(v, "lhs"));
      a.rhs = scalar_from_json<Rational>(require(v, "rhs"));
      out.push_back(std::move(a));
    }
    return out;
  };
  r.violations = list(require(j, "violations"));
  r.triangle_violations = list(require(j, "triangle_violations"));
  return r;
}

template <class S>
json condition_report_to_json(const S& s, const ConditionReport<typename S::point_type, typename S::scalar_type>& r) {
  json vs = json::array();
  for (const auto& v : r.violations)
    vs.push_back({{"x", point_to_json(s, v.x)},
                  {"y", point_to_json(s, v.y)},
                  {"lhs", to_json_scalar(v.lhs)},
                  {"rhs", to_json_scalar(v.rhs)},
                  {"slack", to_json_scalar(v.slack)}});
  return {{"condition", r.condition},
          {"holds", r.holds()},
          {"exhaustive", r.exhaustive},
          {"pairs_checked", r.pairs_checked},
          {"violation_count", r.violation_count},
          {"violations", std::move(vs)}};
}

inline ConditionReport<std::size_t, Rational> condition_report_from_json(const FiniteGMS<Rational>& s, const json& j) {
  ConditionReport<std::size_t, Rational> r;
  r.condition = require(j, "condition").get<std::string>();
  r.exhaustive = require(j, "exhaustive").get<bool>();
  r.pairs_checked = require(j, "pairs_checked").get<std::uint64_t>();
  r.violation_count = require(j, "violation_count").get<std::uint64_t>();
  for (const auto& v : require(j, "violations"))
    r.violations.push_back({point_from_json(s, require(v, "x")), point_from_json(s, require(v, "y")),
                            scalar_from_json<Rational>(require(v, "lhs")), scalar_from_json<Rational>(require(v, "rhs")),
                            scalar_from_json<Rational>(require(v, "slack"))});
  if (require(j, "holds").get<bool>() != r.holds()) throw MalformedInput("'holds' disagrees with violation_count");
  return r;
}

inline json control_validation_to_json(const ControlValidation& v) {
  return {{"ok", v.ok}, {"issues", v.issues}};
}

template <class S>
json pathologies_to_json(const S& s, const std::vector<SequenceRecord<typename S::point_type>>& seqs,
                         const std::vector<PathologyFinding<typename S::point_type, typename S::scalar_type>>& fs) {
  json out = json::array();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto& f = fs[i];
    const auto& seq_points = seqs.at(i).points;
    json limits = json::array();
    for (const auto& l : f.limits) limits.push_back(point_to_json(s, l));
    json cauchy = {{"cauchy", f.cauchy.cauchy}, {"K", f.cauchy.K}};
    if (f.cauchy.witness) {
      cauchy["witness"] = {f.cauchy.witness->first, f.cauchy.witness->second};
      cauchy["witness_points"] = {point_to_json(s, seq_points[f.cauchy.witness->first]),
                                  point_to_json(s, seq_points[f.cauchy.witness->second])};
      cauchy["witness_distance"] = to_json_scalar(f.cauchy.witness_distance);
    }
    json item = {{"limits", limits},
                 {"cauchy", cauchy},
                 {"convergent_not_cauchy", f.convergent_not_cauchy},
                 {"multiple_limits", f.multiple_limits},
                 {"pathological", f.any()}};
    if (f.discontinuity) {
      const auto& d = *f.discontinuity;
      item["discontinuity"] = {{"limit", point_to_json(s, d.limit)},
                               {"probe", point_to_json(s, d.probe)},
                               {"limit_distance", to_json_scalar(d.limit_distance)},
                               {"min_gap", to_json_scalar(d.min_gap)}};
    } else {
      item["discontinuity"] = nullptr;
    }
    out.push_back(std::move(item));
  }
  return out;
}

/// Probe file: {"sequences": [{"points": [...], "limit": p}, ...], "tol": t,
/// "burn_in": k}, or a single sequence at top level.
template <class S>
std::pair<std::vector<SequenceRecord<typename S::point_type>>, PathologyOptions> probes_from_json(const S& s,
                                                                                                 const json& j) {
  std::vector<SequenceRecord<typename S::point_type>> seqs;
  auto one = [&](const json& item) {
    SequenceRecord<typename S::point_type> r;
    for (const auto& p : require(item, "points")) r.points.push_back(point_from_json(s, p));
    if (item.contains("limit") && !item.at("limit").is_null()) r.limit = point_from_json(s, item.at("limit"));
    seqs.push_back(std::move(r));
  };
  if (j.contains("sequences"))
    for (const auto& item : j.at("sequences")) one(item);
  else
    one(j);
  PathologyOptions opt;
  if (j.contains("tol")) opt.tol = scalar_from_json<double>(j.at("tol"));
  if (j.contains("burn_in")) opt.burn_in = j.at("burn_in").get<std::size_t>();
  return {std::move(seqs), opt};
}

template <class S>
json trace_summary_to_json(const S& s, const IterationTrace<typename S::point_type, typename S::scalar_type>& t) {
  json o = {{"status", to_string(t.status)}, {"iterations", t.iterations()}};
  o["final_point"] = point_to_json(s, t.z.back());
  o["final_preimage"] = t.x.size() > t.z.size() ? point_to_json(s, t.x.back()) : json(nullptr);
  o["final_step"] = t.step_dist.empty() ? json(nullptr) : to_json_scalar(t.step_dist.back());
  return o;
}

/// CSV trace: n, x_n, z_n, step_dist (d(z_{n-1}, z_n)), skip_dist (d(z_{n-2}, z_n)).
template <class S>
std::string trace_csv(const S& s, const IterationTrace<typename S::point_type, typename S::scalar_type>& t) {
  using T = scalar_traits<typename S::scalar_type>;
  std::ostringstream out;
  out << "n,x_n,z_n,step_dist,skip_dist\n";
  for (std::size_t n = 0; n < t.z.size(); ++n) {
    out << n << ',' << s.describe(t.x[n]) << ',' << s.describe(t.z[n]) << ',';
    if (n >= 1) out << T::to_string(t.step_dist[n - 1]);
    out << ',';
    if (n >= 2) out << T::to_string(t.skip_dist[n - 2]);
    out << '\n';
  }
  return out.str();
}

template <class S>
json coincidence_to_json(const S& s, const CoincidenceResult<typename S::point_type, typename S::scalar_type>& r) {
  json cs = json::array();
  for (const auto& p : r.coincidences) cs.push_back(point_to_json(s, p));
  json o = {{"u", point_to_json(s, r.u)},
            {"value", point_to_json(s, r.value)},
            {"residual", to_json_scalar(r.residual)},
            {"weakly_compatible", r.weakly_compatible},
            {"is_common_fixed_point", r.is_common_fixed_point},
            {"unique_within_space", r.unique_within_space ? json(*r.unique_within_space) : json(nullptr)},
            {"coincidences", cs},
            {"trace", trace_summary_to_json(s, r.trace)},
            {"hypothesis", condition_report_to_json(s, r.hypothesis)},
            {"controls", control_validation_to_json(r.controls)}};
  if (r.admissibility) o["admissibility"] = condition_report_to_json(s, *r.admissibility);
  if (r.regularity) o["regularity"] = condition_report_to_json(s, *r.regularity);
  return o;
}

// ---------------------------------------------------------------------------
// Dynamic programming

inline DPProblem dp_problem_from_json(const json& j) {
  DPProblem p;
  try {
    for (const auto& s : require(j, "states")) p.states.push_back(s.is_string() ? s.get<std::string>() : s.dump());
    for (const auto& d : require(j, "decisions")) p.decisions.push_back(d.is_string() ? d.get<std::string>() : d.dump());
    for (const auto& row : require(j, "h")) {
      std::vector<double> r;
      for (const auto& v : row) r.push_back(scalar_from_json<double>(v));
      p.h.push_back(std::move(r));
    }
    for (const auto& row : require(j, "G")) {
      std::vector<std::size_t> r;
      for (const auto& v : row) {
        if (is_index(v))
          r.push_back(v.get<std::size_t>());
        else if (v.is_string()) {
          const auto it = std::find(p.states.begin(), p.states.end(), v.get<std::string>());
          if (it == p.states.end()) throw MalformedInput("G refers to unknown state " + v.dump());
          r.push_back(static_cast<std::size_t>(it - p.states.begin()));
        } else {
          throw MalformedInput("G entries must be state indices or names");
        }
      }
      p.G.push_back(std::move(r));
    }
    const auto& f = require(j, "F");
    const std::string kind = require(f, "kind").get<std::string>();
    std::vector<std::vector<double>> r;
    if (f.contains("r"))
      for (const auto& row : f.at("r")) {
        std::vector<double> rr;
        for (const auto& v : row) rr.push_back(scalar_from_json<double>(v));
        r.push_back(std::move(rr));
      }
    const double c = scalar_from_json<double>(require(f, "c"));
    if (kind == "affine")
      p.F = RewardRule::affine(c, std::move(r));
    else if (kind == "clipped")
      p.F = RewardRule::clipped(c, scalar_from_json<double>(require(f, "lo")), scalar_from_json<double>(require(f, "hi")),
                                std::move(r));
    else
      throw MalformedInput("unknown F kind '" + kind + "'");
    p.lipschitz_C = j.contains("lipschitz_C") ? scalar_from_json<double>(j.at("lipschitz_C")) : std::abs(c);
  } catch (const json::exception& e) {
    throw MalformedInput(e.what());
  }
  p.validate();
  return p;
}

inline json dp_problem_to_json(const DPProblem& p) {
  json f = {{"kind", p.F.kind == RewardRule::Kind::affine ? "affine" : "clipped"}, {"c", p.F.c}};
  if (!p.F.r.empty()) f["r"] = p.F.r;
  if (p.F.kind == RewardRule::Kind::clipped) {
    f["lo"] = p.F.lo;
    f["hi"] = p.F.hi;
  }
  return {{"states", p.states}, {"decisions", p.decisions}, {"h", p.h},
          {"G", p.G},           {"F", f},                   {"lipschitz_C", p.lipschitz_C}};
}

inline json dp_solution_to_json(const DPProblem& p, const DPSolution& s) {
  return {{"w", functional_to_json(p.states, s.w)},
          {"z", functional_to_json(p.states, s.z)},
          {"residual", s.residual},
          {"iterations", s.iterations}};
}

inline DPSolution dp_solution_from_json(const DPProblem& p, const json& j) {
  DPSolution s;
  auto read = [&](const json& o) {
    BoundedFunctional f;
    for (const auto& name : p.states) f.values.push_back(scalar_from_json<double>(require(o, name.c_str())));
    return f;
  };
  s.w = read(require(j, "w"));
  s.z = read(require(j, "z"));
  s.residual = scalar_from_json<double>(require(j, "residual"));
  s.iterations = require(j, "iterations").get<std::size_t>();
  return s;
}

inline std::string dp_steps_csv(const DPSolution& s) {
  std::ostringstream out;
  out << "k,sup_step\n";
  for (std::size_t k = 0; k < s.steps.size(); ++k) out << k << ',' << scalar_traits<double>::to_string(s.steps[k]) << '\n';
  return out.str();
}

}  // namespace gmsfp::io
