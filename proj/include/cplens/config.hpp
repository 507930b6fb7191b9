#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cplens/bipoly.hpp"
#include "cplens/errors.hpp"
#include "cplens/model.hpp"
#include "cplens/rational_fn.hpp"
#include "cplens/solver.hpp"

namespace cplens {

/// A model file fully parsed: the deflection model plus any solver-option
/// overrides it carries.
struct LensConfig {
  DeflectionModel model;
  SolveOptions options;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + what + ": '" + t + "'");
  }
  if (used != t.size()) throw ConfigError("trailing junk in " + what + ": '" + t + "'");
  return v;
}

inline int parse_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + what + ": '" + t + "'");
  }
  if (used != t.size()) throw ConfigError("trailing junk in " + what + ": '" + t + "'");
  return int(v);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Sectioned key/value text with optional bare data rows per section.
struct RawConfig {
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::vector<std::string>> rows;

  bool has(const std::string& section, const std::string& key) const {
    auto s = values.find(section);
    return s != values.end() && s->second.count(key) > 0;
  }
  const std::string& get(const std::string& section, const std::string& key) const {
    auto s = values.find(section);
    if (s == values.end() || !s->second.count(key))
      throw ConfigError("missing required key '" + key + "' in section [" + section + "]");
    return s->second.at(key);
  }
};

inline RawConfig read_sections(std::istream& in, const std::string& origin) {
  RawConfig raw;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      raw.values[section];  // remember even if the section stays empty
      continue;
    }
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": data before any [section]");
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      raw.rows[section].push_back(line);
    } else {
      const std::string key = trim(line.substr(0, eq));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      raw.values[section][key] = trim(line.substr(eq + 1));
    }
  }
  return raw;
}

/// Data rows "i j re im" assembled into a polynomial in the two plane
/// variables.
inline BiPoly poly_from_rows(const RawConfig& raw, const std::string& section) {
  auto it = raw.rows.find(section);
  if (it == raw.rows.end() || it->second.empty())
    throw ConfigError("section [" + section + "] needs coefficient rows 'i j re im'");
  std::vector<BiPoly::Term> terms;
  for (const std::string& row : it->second) {
    std::istringstream ss(row);
    std::string fi, fj, fre, fim;
    if (!(ss >> fi >> fj >> fre >> fim))
      throw ConfigError("bad coefficient row in [" + section + "]: '" + row + "'");
    std::string rest;
    if (ss >> rest)
      throw ConfigError("trailing junk in [" + section + "] row: '" + row + "'");
    const int i = parse_int(fi, section + " exponent");
    const int j = parse_int(fj, section + " exponent");
    if (i < 0 || j < 0) throw ConfigError("negative exponent in [" + section + "]");
    terms.push_back({i, j, Cx{parse_double(fre, section + " coefficient"),
                              parse_double(fim, section + " coefficient")}});
  }
  return BiPoly::from_terms(terms);
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& piece : split(s, ','))
    out.push_back(parse_double(piece, what));
  return out;
}

/// Positions "re,im; re,im; ..." — one complex pair per semicolon group.
inline std::vector<Cx> parse_positions(const std::string& s) {
  std::vector<Cx> out;
  for (const std::string& group : split(s, ';')) {
    const auto pair = split(group, ',');
    if (pair.size() != 2)
      throw ConfigError("positions entries must be 're,im' pairs: '" + trim(group) + "'");
    out.emplace_back(parse_double(pair[0], "position"), parse_double(pair[1], "position"));
  }
  return out;
}

}  // namespace detail

/// Parses model text in the flat sectioned format described in
/// docs/config.md. Malformed input raises ConfigError; parameter values that
/// violate model preconditions raise the model's own error types.
inline LensConfig parse_lens_config(std::istream& in, const std::string& origin = "<stream>") {
  const detail::RawConfig raw = detail::read_sections(in, origin);
  if (!raw.values.count("model")) throw ConfigError(origin + ": missing [model] section");

  LensConfig cfg;
  const std::string type = raw.get("model", "type");
  if (type == "point") {
    const auto masses = detail::parse_list(raw.get("model", "masses"), "masses");
    const auto positions = detail::parse_positions(raw.get("model", "positions"));
    if (masses.size() != positions.size())
      throw ConfigError("masses and positions must have the same length");
    cfg.model = point_mass_ensemble(masses, positions);
  } else if (type == "plummer") {
    cfg.model = plummer(detail::parse_double(raw.get("model", "theta_e"), "theta_e"),
                        detail::parse_double(raw.get("model", "a"), "a"));
  } else if (type == "filament") {
    cfg.model = filament(detail::parse_double(raw.get("model", "sigma0"), "sigma0"));
  } else if (type == "raw") {
    RationalFn a1{detail::poly_from_rows(raw, "alpha1.num"),
                  detail::poly_from_rows(raw, "alpha1.den")};
    RationalFn a2{detail::poly_from_rows(raw, "alpha2.num"),
                  detail::poly_from_rows(raw, "alpha2.den")};
    std::string name = raw.has("model", "name") ? raw.get("model", "name") : "raw";
    cfg.model = raw_model(std::move(a1), std::move(a2), std::move(name));
  } else {
    throw ConfigError("unknown model type '" + type + "'");
  }

  if (raw.values.count("solve")) {
    const auto& s = raw.values.at("solve");
    for (const auto& [key, value] : s) {
      if (key == "residual_tol") cfg.options.residual_tol = detail::parse_double(value, key);
      else if (key == "realness_tol") cfg.options.realness_tol = detail::parse_double(value, key);
      else if (key == "dedup_tol") cfg.options.dedup_tol = detail::parse_double(value, key);
      else if (key == "caustic_det_floor")
        cfg.options.caustic_det_floor = detail::parse_double(value, key);
      else if (key == "max_newton_iter") cfg.options.max_newton_iter = detail::parse_int(value, key);
      else throw ConfigError("unknown key '" + key + "' in [solve]");
    }
  }
  return cfg;
}

inline LensConfig load_lens_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  return parse_lens_config(in, path);
}

}  // namespace cplens
