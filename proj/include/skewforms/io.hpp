#pragma once

// File formats: JSON documents for forms, frames, loops, PDEs, strips,
// bundles, grid fields and transform requests; CSV tables for sampled output.
// Indices in files are 1-based. Requires nlohmann/json (json.hpp).

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "skewforms/characteristics.hpp"
#include "skewforms/evolution.hpp"
#include "skewforms/forms.hpp"
#include "skewforms/legendre.hpp"

namespace skewforms::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("E_IO", "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("E_JSON", path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("E_IO", "cannot write '" + path.string() + "'");
  out << text;
}

inline void write_json(const std::filesystem::path& path, const ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

namespace detail {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError("E_FORMAT", std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("E_FORMAT", std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key);
}

inline std::vector<std::string> default_names(const std::string& stem, int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(stem + std::to_string(i));
  return v;
}

inline std::vector<std::string> names_field(const json& j, const char* key, const std::string& stem, int n) {
  auto v = field_or<std::vector<std::string>>(j, key, default_names(stem, n));
  if (static_cast<int>(v.size()) != n)
    throw ValidationError("E_DIMENSION", std::string("'") + key + "' must list " + std::to_string(n) + " names");
  return v;
}

// Shortest round-trip decimal for tables; the JSON serializer uses the same rule.
inline std::string csv_number(double v) { return format_double(v); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Forms

inline ExteriorForm form_from_json(const json& j) {
  const int n = detail::field<int>(j, "n");
  if (n < 1) throw ValidationError("E_DIMENSION", "form needs n >= 1");
  const auto vars = detail::names_field(j, "vars", "x", n);
  const int degree = detail::field<int>(j, "degree");
  if (degree < 0 || degree > n) throw ValidationError("E_DEGREE", "form degree must lie in [0, n]");
  ExteriorForm form(vars, degree);
  for (const auto& t : detail::field_or<json>(j, "terms", json::array())) {
    auto index = detail::field<std::vector<int>>(t, "index");
    if (static_cast<int>(index.size()) != degree) throw ValidationError("E_INDEX", "term index length must equal the degree");
    for (std::size_t k = 0; k < index.size(); ++k) {
      if (index[k] < 1 || index[k] > n) throw ValidationError("E_INDEX", "term index out of range 1..n");
      if (k > 0 && index[k] <= index[k - 1]) throw ValidationError("E_INDEX", "term index must be strictly increasing");
      index[k] -= 1;
    }
    form.add_term(index, parse(detail::field<std::string>(t, "coeff"), vars));
  }
  return form;
}

inline ordered_json form_to_json(const ExteriorForm& form) {
  ordered_json j;
  j["n"] = form.dimension();
  j["vars"] = form.vars();
  j["degree"] = form.degree();
  ordered_json terms = ordered_json::array();
  for (const auto& [idx, c] : form.terms()) {
    std::vector<int> one_based;
    for (int i : idx) one_based.push_back(i + 1);
    terms.push_back({{"index", one_based}, {"coeff", to_string(c)}});
  }
  j["terms"] = terms;
  return j;
}

inline FrameSpec frame_from_json(const json& j, const std::vector<std::string>& vars) {
  const int n = detail::field<int>(j, "n");
  if (n != static_cast<int>(vars.size())) throw ValidationError("E_DIMENSION", "frame dimension does not match the form");
  FrameSpec frame(n);
  for (const auto& c : detail::field_or<json>(j, "c", json::array())) {
    frame.set(detail::field<int>(c, "k") - 1, detail::field<int>(c, "i") - 1, detail::field<int>(c, "j") - 1,
              parse(detail::field<std::string>(c, "coeff"), vars));
  }
  return frame;
}

inline Loop loop_from_json(const json& j) {
  Loop loop;
  loop.vertices = detail::field<std::vector<std::vector<double>>>(j, "vertices");
  loop.samples_per_edge = detail::field_or<int>(j, "samples_per_edge", loop.samples_per_edge);
  return loop;
}

// ---------------------------------------------------------------------------
// Characteristics

inline PdeProblem pde_from_json(const json& j) {
  const int n = detail::field<int>(j, "n");
  if (n < 1) throw ValidationError("E_DIMENSION", "PDE needs n >= 1");
  return PdeProblem::from_text(detail::names_field(j, "vars", "x", n), detail::field_or<std::string>(j, "u", "u"),
                               detail::names_field(j, "p", "p", n), detail::field<std::string>(j, "F"));
}

inline CharacteristicStrip strip_from_json(const json& j) {
  return {detail::field<std::vector<double>>(j, "x"), detail::field<double>(j, "u"),
          detail::field<std::vector<double>>(j, "p")};
}

inline bool is_bundle(const json& j) { return j.is_object() && j.contains("labels"); }

/// { "labels": [...], "transverse": 1-based coordinate (default n), "strips": [...] }
inline Bundle bundle_from_json(const json& j, int n) {
  Bundle b;
  b.labels = detail::field<std::vector<double>>(j, "labels");
  b.transverse = detail::field_or<int>(j, "transverse", n) - 1;
  for (const auto& s : detail::field<json>(j, "strips")) b.strips.push_back(strip_from_json(s));
  return b;
}

inline ordered_json strip_to_json(const CharacteristicStrip& s) {
  ordered_json j;
  j["x"] = s.x;
  j["u"] = s.u;
  j["p"] = s.p;
  return j;
}

inline ordered_json bundle_to_json(const Bundle& b) {
  ordered_json j;
  j["labels"] = b.labels;
  j["transverse"] = b.transverse + 1;
  ordered_json strips = ordered_json::array();
  for (const auto& s : b.strips) strips.push_back(strip_to_json(s));
  j["strips"] = strips;
  return j;
}

inline std::string trajectory_csv(const PdeProblem& problem, const Trajectory& t) {
  std::ostringstream out;
  out << "s";
  for (std::size_t i = 1; i <= problem.x.size(); ++i) out << ",x" << i;
  out << ",u";
  for (std::size_t i = 1; i <= problem.p.size(); ++i) out << ",p" << i;
  out << ",F_residual,strip_residual\n";
  for (const auto& s : t.samples) {
    out << detail::csv_number(s.s);
    for (double v : s.x) out << ',' << detail::csv_number(v);
    out << ',' << detail::csv_number(s.u);
    for (double v : s.p) out << ',' << detail::csv_number(v);
    out << ',' << detail::csv_number(s.f_residual) << ',' << detail::csv_number(s.strip_residual) << '\n';
  }
  return out.str();
}

/// Long-format Jacobian table: k (1-based trajectory index), label, s, J.
inline std::string jacobian_csv(const BundleResult& r) {
  std::ostringstream out;
  out << "k,label,s,J\n";
  for (const auto& series : r.jacobians)
    for (std::size_t i = 0; i < series.s.size(); ++i)
      out << series.index + 1 << ',' << detail::csv_number(series.label) << ',' << detail::csv_number(series.s[i])
          << ',' << detail::csv_number(series.value[i]) << '\n';
  return out.str();
}

inline ordered_json events_to_json(const std::vector<StructureEvent>& events) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : events) {
    ordered_json j;
    j["s_star"] = e.s_star;
    j["label"] = e.label;
    j["functional"] = e.functional;
    j["conserved_u"] = e.conserved_u;
    j["bracket"] = e.bracket;
    j["index"] = e.index + 1;
    j["location"] = e.location;
    j["pre_sign"] = e.pre_sign;
    j["post_sign"] = e.post_sign;
    arr.push_back(j);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Evolution

inline GridField grid_from_json(const json& j) {
  GridField f;
  const auto origin = detail::field<std::vector<double>>(j, "origin");
  const auto spacing = detail::field<std::vector<double>>(j, "spacing");
  const auto shape = detail::field<std::vector<std::size_t>>(j, "shape");
  if (origin.size() != 2 || spacing.size() != 2 || shape.size() != 2)
    throw ValidationError("E_SHAPE", "grid fields are two-dimensional");
  f.grid = GridSpec{{origin[0], origin[1]}, {spacing[0], spacing[1]}, {shape[0], shape[1]}};
  const auto comps = detail::field<json>(j, "components");
  if (!comps.is_object()) throw ValidationError("E_FORMAT", "'components' must map names to value arrays");
  for (const auto& [name, values] : comps.items()) {
    if (!values.is_array()) throw ValidationError("E_FORMAT", "component '" + name + "' must be an array");
    f.components.emplace(name, values.get<std::vector<double>>());
  }
  f.validate();
  return f;
}

inline ordered_json grid_to_json(const GridField& f) {
  ordered_json j;
  j["origin"] = f.grid.origin;
  j["spacing"] = f.grid.spacing;
  j["shape"] = f.grid.shape;
  ordered_json comps = ordered_json::object();
  for (const auto& [name, values] : f.components) comps[name] = values;
  j["components"] = comps;
  return j;
}

// ---------------------------------------------------------------------------
// Legendre

struct LegendreRequest {
  Lagrangian lagrangian;
  Box domain;
  int grid = 201;
};

inline LegendreRequest legendre_request_from_json(const json& j) {
  const int m = detail::field<int>(j, "m");
  if (m != 1 && m != 2) throw ValidationError("E_DIMENSION", "Legendre analysis supports m = 1 or 2");
  LegendreRequest r{Lagrangian::from_text(detail::field<std::string>(j, "L"), m), {}, 0};
  for (const auto& iv : detail::field<std::vector<std::vector<double>>>(j, "domain")) {
    if (iv.size() != 2) throw ValidationError("E_FORMAT", "domain entries are [lo, hi]");
    r.domain.emplace_back(iv[0], iv[1]);
  }
  r.grid = detail::field<int>(j, "grid");
  return r;
}

inline std::string legendre_csv(const LegendreTable& t) {
  std::ostringstream out;
  const auto vn = velocity_names(t.m);
  const auto pn = momentum_names(t.m);
  for (const auto& v : vn) out << v << ',';
  for (const auto& p : pn) out << p << ',';
  out << "H\n";
  for (std::size_t i = 0; i < t.H.size(); ++i) {
    for (double v : t.v[i]) out << detail::csv_number(v) << ',';
    for (double p : t.p[i]) out << detail::csv_number(p) << ',';
    out << detail::csv_number(t.H[i]) << '\n';
  }
  return out.str();
}

}  // namespace skewforms::io
