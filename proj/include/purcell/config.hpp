#pragma once
//
// Run configuration: an INI-style text format with `[section]` headers,
// `key = value` lines and repeated `[material.<name>.oscillator]` blocks.
// See README.md for the grammar and every key.
//

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "purcell/dynamics.hpp"
#include "purcell/errors.hpp"
#include "purcell/greens.hpp"
#include "purcell/numerics.hpp"
#include "purcell/permittivity.hpp"
#include "purcell/spectral.hpp"

namespace purcell {

inline constexpr const char *version = "0.1.0";

enum class GeometryKind { free_space, bulk, half_space, sphere, toy1d };

inline const char *geometry_kind_name(GeometryKind k) {
  switch (k) {
  case GeometryKind::free_space: return "free_space";
  case GeometryKind::bulk: return "bulk";
  case GeometryKind::half_space: return "half_space";
  case GeometryKind::sphere: return "sphere";
  case GeometryKind::toy1d: return "toy1d";
  }
  return "?";
}

struct LayerSpec {
  std::string material;
  double thickness = 0.0;
  bool operator==(const LayerSpec &) const = default;
};

struct GeometrySpec {
  GeometryKind kind = GeometryKind::free_space;
  std::string material;          ///< bulk, half_space, sphere wall
  double z_atom = 0.0;           ///< half_space: atom height
  double radius = 0.0;           ///< sphere radius
  std::string left, right;       ///< toy1d outer media
  std::vector<LayerSpec> layers; ///< toy1d interior
  bool operator==(const GeometrySpec &) const = default;
};

struct EpsSpec {
  std::string material; ///< empty: the geometry's material
  double lo = 0.2;      ///< in units of omega_a
  double hi = 5.0;
  std::size_t points = 50;
  bool operator==(const EpsSpec &) const = default;
};

struct AuditSpec {
  std::size_t pairs = 100;
  std::uint64_t seed = 1;
  std::size_t n_modes = 4000;
  double reciprocity_tolerance = 1e-10;
  double identity_tolerance = 1e-5;
  double kk_tolerance = 1e-4;
  double oracle_tolerance = 5e-3;
  bool operator==(const AuditSpec &) const = default;
};

/// Frequencies (omega_a, oscillator parameters) share one arbitrary unit and
/// lengths are in c over that unit. The window and eps grid are given in
/// units of omega_a, the time horizon in units of 1/gamma0.
struct RunConfig {
  GeometrySpec geometry;
  std::map<std::string, std::vector<LorentzOscillator>> materials;
  double omega_a = 1.0;
  double gamma0 = 1e-3;
  Vec3 dipole = Vec3::UnitZ(); ///< as written; normalized by atom()
  double window_lo = 0.5;
  double window_hi = 1.5;
  std::size_t window_samples = 64;
  double window_tolerance = 1e-2;
  double horizon = 5.0;
  std::size_t time_steps = 10000;
  QuadratureSpec quadrature;
  EpsSpec eps;
  AuditSpec audit;
  std::string output;

  bool operator==(const RunConfig &o) const {
    return geometry == o.geometry && materials == o.materials && omega_a == o.omega_a &&
           gamma0 == o.gamma0 && dipole == o.dipole && window_lo == o.window_lo &&
           window_hi == o.window_hi && window_samples == o.window_samples &&
           window_tolerance == o.window_tolerance && horizon == o.horizon &&
           time_steps == o.time_steps && quadrature.rel_tol == o.quadrature.rel_tol &&
           quadrature.abs_tol == o.quadrature.abs_tol &&
           quadrature.max_subdivisions == o.quadrature.max_subdivisions && eps == o.eps &&
           audit == o.audit && output == o.output;
  }

  PermittivityModel material(const std::string &name) const {
    const auto it = materials.find(name);
    if (it == materials.end())
      throw ConfigError("unknown material '" + name + "'");
    return PermittivityModel(it->second);
  }

  Geometry build_geometry() const {
    switch (geometry.kind) {
    case GeometryKind::free_space: return FreeSpace{};
    case GeometryKind::bulk: return HomogeneousBulk{material(geometry.material)};
    case GeometryKind::half_space: return HalfSpace{material(geometry.material), geometry.z_atom};
    case GeometryKind::sphere: return SphereCavityCenter{geometry.radius, material(geometry.material)};
    case GeometryKind::toy1d: {
      Toy1D t{material(geometry.left), {}, material(geometry.right)};
      for (const auto &l : geometry.layers)
        t.layers.push_back({l.thickness, material(l.material)});
      return t;
    }
    }
    throw ConfigError("unknown geometry kind");
  }

  AtomConfig atom() const { return {omega_a, dipole.normalized(), gamma0}; }
  FrequencyWindow window() const { return {window_lo * omega_a, window_hi * omega_a}; }
  TimeGrid time_grid() const { return TimeGrid(horizon / gamma0, time_steps); }
};

namespace detail {

struct RawEntry {
  std::string key, value;
  int line = 0;
};

struct RawSection {
  std::string name;
  int line = 0;
  std::vector<RawEntry> entries;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

inline std::vector<RawSection> lex(std::string_view text, std::vector<std::string> &errors) {
  std::vector<RawSection> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty())
      continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']' || !valid_name(trim(std::string_view(line).substr(1, line.size() - 2)))) {
        errors.push_back(where + "malformed section header '" + line + "'");
        continue;
      }
      sections.push_back({trim(std::string_view(line).substr(1, line.size() - 2)), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!valid_name(key)) {
      errors.push_back(where + "malformed key '" + key + "'");
      continue;
    }
    if (sections.empty()) {
      errors.push_back(where + "key '" + key + "' appears before any [section]");
      continue;
    }
    sections.back().entries.push_back({key, value, line_no});
  }
  return sections;
}

inline bool is_oscillator_section(const std::string &name, std::string *material = nullptr) {
  constexpr std::string_view prefix = "material.", suffix = ".oscillator";
  if (name.size() <= prefix.size() + suffix.size() || !name.starts_with(prefix) || !name.ends_with(suffix))
    return false;
  if (material)
    *material = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
  return true;
}

// Applies `section.key=value`; the section may carry a 0-based block index
// for repeated oscillator blocks, e.g. material.wall.oscillator[1].gamma=0.02.
inline void apply_override(std::vector<RawSection> &sections, const std::string &spec,
                           std::vector<std::string> &errors) {
  const std::string where = "override '" + spec + "': ";
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    errors.push_back(where + "expected section.key=value");
    return;
  }
  const std::string path = trim(std::string_view(spec).substr(0, eq));
  const std::string value = trim(std::string_view(spec).substr(eq + 1));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    errors.push_back(where + "expected section.key=value");
    return;
  }
  std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  std::size_t index = 0;
  bool indexed = false;
  if (section.back() == ']') {
    const auto open = section.rfind('[');
    const std::string digits = open == std::string::npos ? "" : section.substr(open + 1, section.size() - open - 2);
    if (digits.empty() || std::from_chars(digits.data(), digits.data() + digits.size(), index).ptr !=
                              digits.data() + digits.size()) {
      errors.push_back(where + "malformed block index");
      return;
    }
    section = section.substr(0, open);
    indexed = true;
  }
  std::vector<RawSection *> matches;
  for (auto &s : sections)
    if (s.name == section)
      matches.push_back(&s);
  RawSection *target = nullptr;
  if (indexed) {
    if (index >= matches.size()) {
      errors.push_back(where + "block [" + section + "] #" + std::to_string(index) + " does not exist");
      return;
    }
    target = matches[index];
  } else if (matches.size() > 1) {
    errors.push_back(where + "[" + section + "] is repeated; give a block index such as " + section + "[0]." + key);
    return;
  } else if (matches.empty()) {
    sections.push_back({section, 0, {}});
    target = &sections.back();
  } else {
    target = matches.front();
  }
  for (auto &e : target->entries)
    if (e.key == key) {
      e.value = value;
      return;
    }
  target->entries.push_back({key, value, 0});
}

// Typed access to one section with strict unknown-key and duplicate checks.
class SectionReader {
public:
  SectionReader(const RawSection &s, std::string label, std::vector<std::string> &errors)
      : section_(s), label_(std::move(label)), errors_(errors) {
    for (std::size_t i = 0; i < s.entries.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (s.entries[i].key == s.entries[j].key)
          error(s.entries[i].key, "duplicate key (first given on line " + std::to_string(s.entries[j].line) + ")");
  }

  void error(const std::string &key, const std::string &reason) {
    errors_.push_back("[" + label_ + "] " + key + ": " + reason);
  }

  const RawEntry *find(const std::string &key) {
    known_.push_back(key);
    for (const auto &e : section_.entries)
      if (e.key == key)
        return &e;
    return nullptr;
  }

  bool has(const std::string &key) {
    return find(key) != nullptr;
  }

  void number(const std::string &key, double &out) {
    if (const RawEntry *e = find(key)) {
      double v = 0.0;
      const auto *end = e->value.data() + e->value.size();
      const auto r = std::from_chars(e->value.data(), end, v);
      if (e->value.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
        error(key, "expected a finite number, got '" + e->value + "'");
      else
        out = v;
    }
  }

  template <class Int>
  void integer(const std::string &key, Int &out) {
    if (const RawEntry *e = find(key)) {
      Int v = 0;
      const auto *end = e->value.data() + e->value.size();
      const auto r = std::from_chars(e->value.data(), end, v);
      if (e->value.empty() || r.ec != std::errc() || r.ptr != end)
        error(key, "expected a non-negative integer, got '" + e->value + "'");
      else
        out = v;
    }
  }

  void text(const std::string &key, std::string &out) {
    if (const RawEntry *e = find(key))
      out = e->value;
  }

  void required(const std::string &key, std::vector<std::string> &missing) {
    if (!has(key))
      missing.push_back("[" + label_ + "] " + key);
  }

  /// Reports keys that were never asked for.
  void finish() {
    for (const auto &e : section_.entries)
      if (std::find(known_.begin(), known_.end(), e.key) == known_.end())
        error(e.key, "unknown key" + (e.line ? " (line " + std::to_string(e.line) + ")" : std::string()));
  }

private:
  const RawSection &section_;
  std::string label_;
  std::vector<std::string> &errors_;
  std::vector<std::string> known_;
};

inline std::vector<double> split_numbers(const std::string &s, bool &ok) {
  std::vector<double> out;
  ok = true;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
      ok = false;
      return {};
    }
    out.push_back(v);
  }
  return out;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

} // namespace detail

/// Parses and validates a configuration. Overrides (`section.key=value`) are
/// applied to the text before validation. Every problem found is reported in
/// one ConfigError, one line per problem, naming section, key and reason.
inline RunConfig parse_config(std::string_view text, std::span<const std::string> overrides = {}) {
  using detail::SectionReader;
  std::vector<std::string> errors, missing;
  std::vector<detail::RawSection> sections = detail::lex(text, errors);
  for (const auto &o : overrides)
    detail::apply_override(sections, o, errors);

  RunConfig cfg;
  std::map<std::string, int> seen;
  const std::vector<std::string> singletons = {"geometry", "atom", "window", "time",
                                               "quadrature", "eps", "audit", "output"};
  bool have_geometry = false;
  std::string type_text;

  for (const auto &s : sections) {
    std::string material_name;
    if (detail::is_oscillator_section(s.name, &material_name)) {
      auto &list = cfg.materials[material_name];
      const std::string label = s.name + " #" + std::to_string(list.size() + 1);
      SectionReader r(s, label, errors);
      LorentzOscillator o;
      o.omega_t = o.omega_p = o.gamma = std::numeric_limits<double>::quiet_NaN();
      for (const char *k : {"omega_t", "omega_p", "gamma"})
        r.required(k, missing);
      r.number("omega_t", o.omega_t);
      r.number("omega_p", o.omega_p);
      r.number("gamma", o.gamma);
      if (o.omega_t <= 0.0)
        r.error("omega_t", "must be > 0 (transverse resonance frequency), got " + detail::format_exact(o.omega_t));
      if (o.omega_p < 0.0)
        r.error("omega_p", "must be >= 0 (oscillator strength), got " + detail::format_exact(o.omega_p));
      if (o.gamma <= 0.0)
        r.error("gamma", "must be > 0 (Lorentz linewidth positivity, required for causal absorption), got " +
                             detail::format_exact(o.gamma));
      r.finish();
      list.push_back(o);
      continue;
    }
    if (std::find(singletons.begin(), singletons.end(), s.name) == singletons.end()) {
      errors.push_back("[" + s.name + "]: unknown section" +
                       (s.line ? " (line " + std::to_string(s.line) + ")" : std::string()));
      continue;
    }
    if (seen[s.name]++ > 0) {
      errors.push_back("[" + s.name + "]: section given more than once");
      continue;
    }
    SectionReader r(s, s.name, errors);
    if (s.name == "geometry") {
      have_geometry = true;
      r.required("type", missing);
      r.text("type", type_text);
      r.text("material", cfg.geometry.material);
      r.number("z_atom", cfg.geometry.z_atom);
      r.number("radius", cfg.geometry.radius);
      r.text("left", cfg.geometry.left);
      r.text("right", cfg.geometry.right);
      const bool has_material = r.has("material"), has_z = r.has("z_atom"), has_radius = r.has("radius"),
                 has_left = r.has("left"), has_right = r.has("right"), has_layers = r.has("layers");
      if (const auto *e = r.find("layers")) {
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const std::string t = detail::trim(item);
          const auto colon = t.find(':');
          bool ok = colon != std::string::npos;
          LayerSpec layer;
          if (ok) {
            layer.material = detail::trim(std::string_view(t).substr(0, colon));
            const std::string num = detail::trim(std::string_view(t).substr(colon + 1));
            const auto res = std::from_chars(num.data(), num.data() + num.size(), layer.thickness);
            ok = !layer.material.empty() && res.ec == std::errc() && res.ptr == num.data() + num.size();
          }
          if (!ok) {
            r.error("layers", "expected 'material:thickness, ...', got '" + t + "'");
            break;
          }
          if (!(layer.thickness > 0.0))
            r.error("layers", "layer thickness must be > 0, got " + detail::format_exact(layer.thickness));
          cfg.geometry.layers.push_back(layer);
        }
      }
      const std::map<std::string, GeometryKind> kinds = {{"free_space", GeometryKind::free_space},
                                                         {"bulk", GeometryKind::bulk},
                                                         {"half_space", GeometryKind::half_space},
                                                         {"sphere", GeometryKind::sphere},
                                                         {"toy1d", GeometryKind::toy1d}};
      if (!type_text.empty()) {
        const auto it = kinds.find(type_text);
        if (it == kinds.end()) {
          r.error("type", "expected one of free_space, bulk, half_space, sphere, toy1d; got '" + type_text + "'");
        } else {
          cfg.geometry.kind = it->second;
          const GeometryKind k = it->second;
          auto needs = [&](bool present, const char *key, bool wanted) {
            if (wanted && !present)
              missing.push_back(std::string("[geometry] ") + key + " (required for type = " + type_text + ")");
            if (!wanted && present)
              r.error(key, "not used by type = " + type_text);
          };
          const bool medium = k == GeometryKind::bulk || k == GeometryKind::half_space || k == GeometryKind::sphere;
          needs(has_material, "material", medium);
          needs(has_z, "z_atom", k == GeometryKind::half_space);
          needs(has_radius, "radius", k == GeometryKind::sphere);
          needs(has_left, "left", k == GeometryKind::toy1d);
          needs(has_right, "right", k == GeometryKind::toy1d);
          needs(has_layers, "layers", k == GeometryKind::toy1d);
          if (k == GeometryKind::half_space && has_z && !(cfg.geometry.z_atom > 0.0))
            r.error("z_atom", "atom must sit above the interface (z_atom > 0), got " +
                                  detail::format_exact(cfg.geometry.z_atom));
          if (k == GeometryKind::sphere && has_radius && !(cfg.geometry.radius > 0.0))
            r.error("radius", "must be > 0, got " + detail::format_exact(cfg.geometry.radius));
        }
      }
    } else if (s.name == "atom") {
      r.number("omega_a", cfg.omega_a);
      r.number("gamma0", cfg.gamma0);
      if (const auto *e = r.find("dipole")) {
        bool ok = false;
        const auto v = detail::split_numbers(e->value, ok);
        if (!ok || v.size() != 3)
          r.error("dipole", "expected three comma-separated numbers, got '" + e->value + "'");
        else if (Vec3(v[0], v[1], v[2]).norm() == 0.0)
          r.error("dipole", "orientation must be a nonzero vector");
        else
          cfg.dipole = Vec3(v[0], v[1], v[2]);
      }
      if (!(cfg.omega_a > 0.0))
        r.error("omega_a", "must be > 0, got " + detail::format_exact(cfg.omega_a));
      if (!(cfg.gamma0 > 0.0))
        r.error("gamma0", "must be > 0, got " + detail::format_exact(cfg.gamma0));
    } else if (s.name == "window") {
      r.number("lo", cfg.window_lo);
      r.number("hi", cfg.window_hi);
      r.integer("samples", cfg.window_samples);
      r.number("tolerance", cfg.window_tolerance);
      if (!(cfg.window_lo > 0.0 && cfg.window_lo < 1.0))
        r.error("lo", "must satisfy 0 < lo < 1 so the window encloses omega_a, got " +
                          detail::format_exact(cfg.window_lo));
      if (!(cfg.window_hi > 1.0))
        r.error("hi", "must be > 1 so the window encloses omega_a, got " + detail::format_exact(cfg.window_hi));
      if (cfg.window_samples < 16)
        r.error("samples", "must be >= 16, got " + std::to_string(cfg.window_samples));
      if (!(cfg.window_tolerance > 0.0))
        r.error("tolerance", "must be > 0");
    } else if (s.name == "time") {
      r.number("horizon", cfg.horizon);
      r.integer("steps", cfg.time_steps);
      if (!(cfg.horizon > 0.0))
        r.error("horizon", "must be > 0, got " + detail::format_exact(cfg.horizon));
      if (cfg.time_steps < 2)
        r.error("steps", "must be >= 2, got " + std::to_string(cfg.time_steps));
    } else if (s.name == "quadrature") {
      r.number("rel_tol", cfg.quadrature.rel_tol);
      r.number("abs_tol", cfg.quadrature.abs_tol);
      r.integer("max_subdivisions", cfg.quadrature.max_subdivisions);
      if (!(cfg.quadrature.rel_tol > 0.0))
        r.error("rel_tol", "must be > 0");
      if (!(cfg.quadrature.abs_tol >= 0.0))
        r.error("abs_tol", "must be >= 0");
      if (cfg.quadrature.max_subdivisions < 1)
        r.error("max_subdivisions", "must be >= 1");
    } else if (s.name == "eps") {
      r.text("material", cfg.eps.material);
      r.number("lo", cfg.eps.lo);
      r.number("hi", cfg.eps.hi);
      r.integer("points", cfg.eps.points);
      if (!(cfg.eps.lo > 0.0 && cfg.eps.lo < cfg.eps.hi))
        r.error("lo", "must satisfy 0 < lo < hi");
      if (cfg.eps.points < 2)
        r.error("points", "must be >= 2");
    } else if (s.name == "audit") {
      r.integer("pairs", cfg.audit.pairs);
      r.integer("seed", cfg.audit.seed);
      r.integer("n_modes", cfg.audit.n_modes);
      r.number("reciprocity_tolerance", cfg.audit.reciprocity_tolerance);
      r.number("identity_tolerance", cfg.audit.identity_tolerance);
      r.number("kk_tolerance", cfg.audit.kk_tolerance);
      r.number("oracle_tolerance", cfg.audit.oracle_tolerance);
      if (cfg.audit.pairs < 1)
        r.error("pairs", "must be >= 1");
      if (cfg.audit.n_modes < 100)
        r.error("n_modes", "must be >= 100, got " + std::to_string(cfg.audit.n_modes));
      const std::pair<const char *, double> tolerances[] = {
          {"reciprocity_tolerance", cfg.audit.reciprocity_tolerance},
          {"identity_tolerance", cfg.audit.identity_tolerance},
          {"kk_tolerance", cfg.audit.kk_tolerance},
          {"oracle_tolerance", cfg.audit.oracle_tolerance}};
      for (const auto &[key, value] : tolerances)
        if (!(value > 0.0))
          r.error(key, "must be > 0");
    } else if (s.name == "output") {
      r.text("path", cfg.output);
    }
    r.finish();
  }
  if (!have_geometry)
    missing.push_back("[geometry] type");

  // Cross-references.
  auto resolve = [&](const std::string &key, const std::string &name) {
    if (!name.empty() && !cfg.materials.count(name))
      errors.push_back("[geometry] " + key + ": material '" + name + "' has no [material." + name +
                       ".oscillator] block");
  };
  resolve("material", cfg.geometry.material);
  resolve("left", cfg.geometry.left);
  resolve("right", cfg.geometry.right);
  for (const auto &l : cfg.geometry.layers)
    resolve("layers", l.material);
  if (!cfg.eps.material.empty() && !cfg.materials.count(cfg.eps.material))
    errors.push_back("[eps] material: material '" + cfg.eps.material + "' has no [material." +
                     cfg.eps.material + ".oscillator] block");

  if (!missing.empty()) {
    std::string m = "missing required keys:";
    for (const auto &k : missing)
      m += " " + k + ";";
    m.pop_back();
    errors.insert(errors.begin(), m);
  }
  if (!errors.empty()) {
    std::string all;
    for (const auto &e : errors)
      all += (all.empty() ? "" : "\n") + e;
    throw ConfigError(all);
  }
  return cfg;
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig &c) {
  using detail::format_exact;
  std::ostringstream o;
  o << "[geometry]\ntype = " << geometry_kind_name(c.geometry.kind) << "\n";
  switch (c.geometry.kind) {
  case GeometryKind::free_space: break;
  case GeometryKind::bulk: o << "material = " << c.geometry.material << "\n"; break;
  case GeometryKind::half_space:
    o << "material = " << c.geometry.material << "\nz_atom = " << format_exact(c.geometry.z_atom) << "\n";
    break;
  case GeometryKind::sphere:
    o << "material = " << c.geometry.material << "\nradius = " << format_exact(c.geometry.radius) << "\n";
    break;
  case GeometryKind::toy1d: {
    o << "left = " << c.geometry.left << "\nright = " << c.geometry.right << "\nlayers = ";
    for (std::size_t i = 0; i < c.geometry.layers.size(); ++i)
      o << (i ? ", " : "") << c.geometry.layers[i].material << ":" << format_exact(c.geometry.layers[i].thickness);
    o << "\n";
    break;
  }
  }
  for (const auto &[name, list] : c.materials)
    for (const auto &osc : list)
      o << "\n[material." << name << ".oscillator]\nomega_t = " << format_exact(osc.omega_t)
        << "\nomega_p = " << format_exact(osc.omega_p) << "\ngamma = " << format_exact(osc.gamma) << "\n";
  o << "\n[atom]\nomega_a = " << format_exact(c.omega_a) << "\ngamma0 = " << format_exact(c.gamma0)
    << "\ndipole = " << format_exact(c.dipole.x()) << ", " << format_exact(c.dipole.y()) << ", "
    << format_exact(c.dipole.z()) << "\n";
  o << "\n[window]\nlo = " << format_exact(c.window_lo) << "\nhi = " << format_exact(c.window_hi)
    << "\nsamples = " << c.window_samples << "\ntolerance = " << format_exact(c.window_tolerance) << "\n";
  o << "\n[time]\nhorizon = " << format_exact(c.horizon) << "\nsteps = " << c.time_steps << "\n";
  o << "\n[quadrature]\nrel_tol = " << format_exact(c.quadrature.rel_tol)
    << "\nabs_tol = " << format_exact(c.quadrature.abs_tol)
    << "\nmax_subdivisions = " << c.quadrature.max_subdivisions << "\n";
  o << "\n[eps]\n";
  if (!c.eps.material.empty())
    o << "material = " << c.eps.material << "\n";
  o << "lo = " << format_exact(c.eps.lo) << "\nhi = " << format_exact(c.eps.hi) << "\npoints = " << c.eps.points
    << "\n";
  o << "\n[audit]\npairs = " << c.audit.pairs << "\nseed = " << c.audit.seed << "\nn_modes = " << c.audit.n_modes
    << "\nreciprocity_tolerance = " << format_exact(c.audit.reciprocity_tolerance)
    << "\nidentity_tolerance = " << format_exact(c.audit.identity_tolerance)
    << "\nkk_tolerance = " << format_exact(c.audit.kk_tolerance)
    << "\noracle_tolerance = " << format_exact(c.audit.oracle_tolerance) << "\n";
  if (!c.output.empty())
    o << "\n[output]\npath = " << c.output << "\n";
  return o.str();
}

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
inline std::string config_hash(const RunConfig &c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace purcell
