#ifndef APD_IO_HPP
#define APD_IO_HPP

// JSON and CSV forms of patterns, rules, cocycle specs, graphs and profiles.
// Exact scalars travel as strings ("1/2+1/2*sqrt(5)").

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "apd/apcomplex.hpp"
#include "apd/equivariance.hpp"
#include "apd/error.hpp"
#include "apd/exactnum.hpp"
#include "apd/generators.hpp"
#include "apd/patterns.hpp"

namespace apd {

using Json = nlohmann::json;

/// Shortest decimal that reads back to the same double; "null" for non-finite.
inline Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline Json vector_to_json(const ExactVector& v) {
  if (v.dim() == 1) return v[0].str();
  return Json::array({v[0].str(), v[1].str()});
}

inline ExactScalar scalar_from_json(const Json& j, long field) {
  if (j.is_string()) return ExactScalar::parse(j.get<std::string>(), field);
  if (j.is_number_integer()) return ExactScalar(j.get<long>());
  throw ConfigError("expected an exact scalar string, got " + j.dump());
}

inline ExactVector vector_from_json(const Json& j, int dim, long field) {
  if (dim == 1) {
    if (j.is_array()) {
      if (j.size() != 1) throw ConfigError("1D point must have one coordinate: " + j.dump());
      return ExactVector(scalar_from_json(j[0], field));
    }
    return ExactVector(scalar_from_json(j, field));
  }
  if (!j.is_array() || j.size() != 2) throw ConfigError("2D point must be a pair: " + j.dump());
  return ExactVector(scalar_from_json(j[0], field), scalar_from_json(j[1], field));
}

inline Json pattern_to_json(const PatternSample& p) {
  Json points = Json::array();
  for (const auto& q : p.points()) points.push_back(vector_to_json(q));
  Json j{{"field", p.field()},
         {"dim", p.dim()},
         {"window", {{"lo", vector_to_json(p.window().lo)}, {"hi", vector_to_json(p.window().hi)}}},
         {"points", std::move(points)}};
  if (p.has_tiles()) j["labels"] = p.tiles();
  return j;
}

inline PatternSample pattern_from_json(const Json& j) {
  try {
    const long field = j.value("field", 0L);
    const int dim = j.value("dim", 1);
    if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
    if (!j.contains("points") || !j["points"].is_array()) throw ConfigError("pattern needs a 'points' array");
    std::vector<ExactVector> pts;
    for (const auto& q : j["points"]) pts.push_back(vector_from_json(q, dim, field));
    if (pts.empty()) throw ConfigError("pattern has no points");
    Box window;
    if (j.contains("window")) {
      window = Box{vector_from_json(j["window"].at("lo"), dim, field), vector_from_json(j["window"].at("hi"), dim, field)};
    } else {
      // Bounding box of the points.
      window = Box{pts.front(), pts.front()};
      if (dim == 1) {
        window.hi = pts.back();
      } else {
        ExactScalar lo0 = pts[0][0], hi0 = pts[0][0], lo1 = pts[0][1], hi1 = pts[0][1];
        for (const auto& q : pts) {
          lo0 = min(lo0, q[0]);
          hi0 = max(hi0, q[0]);
          lo1 = min(lo1, q[1]);
          hi1 = max(hi1, q[1]);
        }
        window = Box{ExactVector(lo0, lo1), ExactVector(hi0, hi1)};
      }
    }
    std::string labels = j.value("labels", std::string());
    return PatternSample(field, std::move(pts), std::move(window), std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed pattern file: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("invalid pattern: ") + e.what());
  }
}

/// {"builtin": name} or {name?, alphabet, images, d, lengths?}; a bare string names a builtin.
inline SubstitutionRule rule_from_json(const Json& j) {
  try {
    if (j.is_string()) return builtin_rule(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("rule must be an object or a builtin name");
    if (j.contains("builtin")) return builtin_rule(j["builtin"].get<std::string>());
    const std::string alphabet = j.at("alphabet").get<std::string>();
    std::map<char, std::string> images;
    for (const auto& [key, value] : j.at("images").items()) {
      if (key.size() != 1) throw ConfigError("image keys must be single letters, got '" + key + "'");
      images[key[0]] = value.get<std::string>();
    }
    const long field = j.value("d", 0L);
    std::optional<std::map<char, ExactScalar>> lengths;
    if (j.contains("lengths")) {
      lengths.emplace();
      for (const auto& [key, value] : j["lengths"].items()) {
        if (key.size() != 1) throw ConfigError("length keys must be single letters, got '" + key + "'");
        (*lengths)[key[0]] = scalar_from_json(value, field);
      }
    }
    return make_rule(j.value("name", std::string("custom")), alphabet, std::move(images), field, std::move(lengths));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed rule: ") + e.what());
  }
}

inline Json rule_to_json(const SubstitutionRule& r) {
  Json images = Json::object(), lengths = Json::object();
  for (const auto& [c, w] : r.images) images[std::string(1, c)] = w;
  for (const auto& [c, l] : r.lengths) lengths[std::string(1, c)] = l.str();
  return {{"name", r.name}, {"alphabet", r.alphabet}, {"images", images}, {"d", r.field}, {"lengths", lengths},
          {"lambda", r.lambda.str()}};
}

/// Cocycle part of a deformation spec. `table` maps collared words (length
/// 2k + 1) or single letters to exact values; `identity` keeps the tile
/// lengths; `random` draws per-class relative changes with the given amplitude.
struct CocycleSpec {
  std::optional<Json> rule;
  int k = 0;
  std::map<std::string, std::string> table;
  bool identity = false;
  std::optional<double> random_amplitude;
};

inline CocycleSpec cocycle_spec_from_json(const Json& j) {
  try {
    CocycleSpec s;
    if (j.contains("rule")) s.rule = j["rule"];
    s.k = j.value("k", 0);
    if (s.k < 0) throw ConfigError("collar level k must be non-negative");
    const Json& c = j.at("cocycle");
    if (c.is_string()) {
      if (c.get<std::string>() != "identity") throw ConfigError("unknown cocycle keyword '" + c.get<std::string>() + "'");
      s.identity = true;
    } else if (c.is_object() && c.contains("random")) {
      s.random_amplitude = c["random"].get<double>();
    } else if (c.is_object()) {
      for (const auto& [key, value] : c.items()) {
        if (key.size() != 1 && key.size() != static_cast<std::size_t>(2 * s.k + 1))
          throw ConfigError("cocycle key '" + key + "' is neither a letter nor a collared word of length " +
                            std::to_string(2 * s.k + 1));
        if (value.is_string()) s.table[key] = value.get<std::string>();
        else if (value.is_number_integer()) s.table[key] = std::to_string(value.get<long>());
        else throw ConfigError("cocycle values must be exact-scalar strings");
      }
    } else {
      throw ConfigError("cocycle must be an object or \"identity\"");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed cocycle spec: ") + e.what());
  }
}

/// Resolves a table spec against a graph. Letter keys apply to every collared
/// word with that central letter; word keys override them.
inline Cochain resolve_cocycle_table(const CocycleSpec& s, const ApGraph& g, long field) {
  std::map<char, ExactScalar> by_letter;
  std::map<std::string, ExactScalar> by_word;
  for (const auto& [key, text] : s.table) {
    const ExactScalar v = ExactScalar::parse(text, field);
    if (key.size() == 1 && g.k > 0) by_letter.emplace(key[0], v);
    else by_word.emplace(key, v);
  }
  Cochain f;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (auto it = by_word.find(g.edges[e]); it != by_word.end()) {
      f.push_back(it->second);
    } else if (auto jt = by_letter.find(g.letter(e)); jt != by_letter.end()) {
      f.push_back(jt->second);
    } else {
      throw ConfigError("cocycle has no value for edge class '" + g.edges[e] + "'");
    }
  }
  return f;
}

inline Json graph_to_json(const ApGraph& g) {
  Json edges = Json::array();
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    edges.push_back({{"word", g.edges[e]}, {"label", std::string(1, g.letter(e))}, {"source", g.source[e]},
                     {"target", g.target[e]}, {"length", g.lengths[e].str()}});
  return {{"k", g.k}, {"vertices", g.vertex_count}, {"edges", edges}, {"collar_span", g.collar_span.str()},
          {"loop_span", g.loop_span.str()}};
}

inline std::string fmt_double(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string cochain_csv(const ApGraph& g, const Cochain& f) {
  std::ostringstream os;
  os << "edge,word,label,length,value,value_approx\n";
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    os << e << ',' << g.edges[e] << ',' << g.letter(e) << ',' << g.lengths[e].str() << ',' << f[e].str() << ','
       << fmt_double(f[e].to_double()) << '\n';
  return os.str();
}

/// r, sup|value|, count, censored, and sup(r_j) / sup(r_{j-1}).
inline std::string decay_csv(const std::vector<DecayRow>& rows) {
  std::ostringstream os;
  os << "r,r_approx,sup,count,censored,ratio\n";
  for (std::size_t j = 0; j < rows.size(); ++j) {
    os << rows[j].radius.str() << ',' << fmt_double(rows[j].radius.to_double()) << ',' << fmt_double(rows[j].sup)
       << ',' << rows[j].count << ',' << rows[j].censored << ',';
    if (j > 0 && rows[j - 1].sup > 0) os << fmt_double(rows[j].sup / rows[j - 1].sup);
    os << '\n';
  }
  return os.str();
}

template <class V>
std::string site_function_csv(const SiteFunction<V>& f) {
  std::ostringstream os;
  const PatternSample& p = *f.pattern;
  os << (p.dim() == 1 ? "x" : "x,y");
  const std::size_t width = f.values.empty() ? 1 : components(f.values.front()).size();
  for (std::size_t c = 0; c < width; ++c) os << ",value" << (width > 1 ? std::to_string(c) : "");
  os << '\n';
  for (std::size_t t = 0; t < f.size(); ++t) {
    const std::size_t i = f.domain[t];
    os << fmt_double(p.approx(i, 0));
    if (p.dim() == 2) os << ',' << fmt_double(p.approx(i, 1));
    for (double v : components(f.values[t])) os << ',' << fmt_double(v);
    os << '\n';
  }
  return os.str();
}

inline std::string sampled_field_csv(const SampledField& s) {
  std::ostringstream os;
  os << "x,value,derivative\n";
  for (std::size_t j = 0; j < s.values.size(); ++j)
    os << fmt_double(s.x(j)) << ',' << fmt_double(s.values[j]) << ',' << fmt_double(s.derivative[j]) << '\n';
  return os.str();
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace apd

#endif  // APD_IO_HPP
