// apd: generate, analyze and deform aperiodic point patterns.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "apd/apcomplex.hpp"
#include "apd/deform.hpp"
#include "apd/equivariance.hpp"
#include "apd/error.hpp"
#include "apd/generators.hpp"
#include "apd/io.hpp"
#include "apd/patterns.hpp"
#include "apd/svg.hpp"

namespace {

using apd::ExactScalar;
using apd::Json;

enum ExitCode { kOk = 0, kConfig = 2, kWindow = 3, kInadmissible = 4, kInternal = 5 };

struct Options {
  std::string command;
  std::string rule;
  std::string pattern;
  std::string cocycle;
  std::string radii;
  std::string out;
  std::string r;
  std::string search = "50";
  int k = -1;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool svg = false;
};

struct Context {
  std::optional<apd::SubstitutionRule> rule;
  apd::PatternPtr pattern;
  std::string source;  // how the pattern was obtained
};

apd::SubstitutionRule load_rule(const std::string& arg) {
  if (std::filesystem::exists(arg)) return apd::rule_from_json(apd::read_json_file(arg));
  return apd::builtin_rule(arg);
}

// Smallest iteration count giving at least `min_tiles` tiles.
int auto_iterations(const apd::SubstitutionRule& rule, std::size_t min_tiles) {
  std::string w(1, rule.alphabet[0]);
  for (int k = 0; k < 64; ++k) {
    if (w.size() >= min_tiles) return k;
    std::string next;
    for (char c : w) next += rule.images.at(c);
    if (next.size() == w.size()) {
      // Non-growing rule (periodic): repeat the word instead.
      return -1;
    }
    w = std::move(next);
  }
  return 64;
}

apd::PatternSample realize(const apd::SubstitutionRule& rule, int iterations, std::size_t min_tiles) {
  if (iterations > 0) return apd::realize_points(rule, apd::substitution_fixed_word(rule, rule.alphabet[0], iterations));
  const int k = auto_iterations(rule, min_tiles);
  if (k >= 0) return apd::realize_points(rule, apd::substitution_fixed_word(rule, rule.alphabet[0], k));
  std::string w;
  const std::string unit = rule.images.at(rule.alphabet[0]);
  while (w.size() < min_tiles) w += unit;
  return apd::realize_points(rule, w);
}

Context load_context(const Options& o, const std::optional<Json>& spec_rule) {
  Context c;
  if (!o.rule.empty()) c.rule = load_rule(o.rule);
  else if (spec_rule) c.rule = apd::rule_from_json(*spec_rule);
  if (!o.pattern.empty()) {
    c.pattern = std::make_shared<const apd::PatternSample>(apd::pattern_from_json(apd::read_json_file(o.pattern)));
    c.source = "file " + o.pattern;
  } else if (c.rule) {
    auto p = realize(*c.rule, o.iterations, 600);
    c.source = "substitution " + c.rule->name;
    c.pattern = std::make_shared<const apd::PatternSample>(std::move(p));
  } else {
    throw apd::ConfigError("need --pattern or --rule");
  }
  return c;
}

std::vector<ExactScalar> parse_radii(const std::string& text, long field, std::vector<ExactScalar> fallback) {
  if (text.empty()) return fallback;
  std::vector<ExactScalar> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    if (item.empty()) throw apd::ConfigError("empty entry in --radii");
    ExactScalar r = ExactScalar::parse(item, field);
    if (r.sign() <= 0) throw apd::ConfigError("radii must be positive: " + item);
    out.push_back(std::move(r));
    start = end + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

Json radii_json(const std::vector<ExactScalar>& radii) {
  Json j = Json::array();
  for (const auto& r : radii) j.push_back(r.str());
  return j;
}

Json provenance(const Options& o, const Context& c) {
  Json j{{"command", o.command},
         {"source", c.source},
         {"points", c.pattern->size()},
         {"field", c.pattern->field()},
         {"window", {{"lo", apd::vector_to_json(c.pattern->window().lo)}, {"hi", apd::vector_to_json(c.pattern->window().hi)}}},
         {"seed", o.seed}};
  j["rule"] = c.rule ? apd::rule_to_json(*c.rule) : Json(nullptr);
  if (!o.cocycle.empty()) j["cocycle_spec"] = o.cocycle;
  return j;
}

std::filesystem::path out_dir(const Options& o) {
  std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  return dir;
}

void emit(const Options& o, const std::string& name, const Json& report) {
  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    apd::write_text_file((out_dir(o) / name).string(), text);
    std::cout << (out_dir(o) / name).string() << "\n";
  }
}

void write_aux(const Options& o, const std::string& name, const std::string& text) {
  if (o.out.empty()) return;
  apd::write_text_file((out_dir(o) / name).string(), text);
}

// ---- generate ----

int cmd_generate(const Options& o) {
  if (o.rule.empty()) throw apd::ConfigError("generate needs --rule");
  if (o.k < 0) throw apd::ConfigError("generate needs --k (substitution iterations)");
  const auto rule = load_rule(o.rule);
  const auto p = apd::realize_points(rule, apd::substitution_fixed_word(rule, rule.alphabet[0], o.k));
  if (o.out.empty()) {
    std::cout << apd::pattern_to_json(p).dump(2) << "\n";
  } else {
    write_aux(o, "pattern.json", apd::pattern_to_json(p).dump(2) + "\n");
    if (o.svg) write_aux(o, "pattern.svg", apd::svg::point_plot(p));
    std::cout << (out_dir(o) / "pattern.json").string() << "\n";
  }
  return kOk;
}

// ---- analyze ----

int cmd_analyze(const Options& o) {
  const Context c = load_context(o, std::nullopt);
  const apd::PatternSample& p = *c.pattern;
  const auto radii = parse_radii(o.radii, p.field(), {ExactScalar(1), ExactScalar(2), ExactScalar(3), ExactScalar(4)});
  const int k_max = o.k < 0 ? 2 : o.k;

  Json table = Json::array();
  for (const auto& r : radii) {
    const auto classes = apd::classify_patches(p, r);
    Json row{{"r", r.str()}, {"classes", classes.classes.size()}, {"anchors", classes.anchors.size()}};
    try {
      if (p.dim() == 1) {
        const auto a = apd::compute_a(p, r);
        row["a_p"] = a.str();
        row["a_p_approx"] = apd::number(a.to_double());
      } else {
        const auto a_sq = apd::compute_a_sq(p, r);
        row["a_p_sq"] = a_sq.str();
        row["a_p_approx"] = apd::number(std::sqrt(a_sq.to_double()));
      }
    } catch (const apd::PreconditionError& e) {
      row["a_p"] = nullptr;
      row["a_p_note"] = e.what();
    }
    table.push_back(std::move(row));
  }

  // Unordered anchor pairs whose patches agree at least to each radius.
  std::vector<std::size_t> pairs(radii.size(), 0), censored(radii.size(), 0);
  std::vector<ExactScalar> sq;
  for (const auto& r : radii) sq.push_back(r * r);
  std::string rec_csv = "first,second,size_sq,size_approx,censored\n";
  apd::for_each_agreement(p, radii.front(), [&](const apd::Recurrence& rec) {
    for (std::size_t j = 0; j < radii.size(); ++j) {
      if (!rec.censored && rec.size_sq < sq[j]) break;
      ++pairs[j];
      if (rec.censored) ++censored[j];
    }
    rec_csv += std::to_string(rec.first) + "," + std::to_string(rec.second) + "," + rec.size_sq.str() + "," +
               apd::fmt_double(rec.size()) + "," + (rec.censored ? "1" : "0") + "\n";
  });
  Json recurrences = Json::array();
  for (std::size_t j = 0; j < radii.size(); ++j)
    recurrences.push_back({{"r", radii[j].str()}, {"pairs", pairs[j]}, {"censored", censored[j]}});

  Json report{{"provenance", provenance(o, c)}, {"patch_classes", table}, {"recurrences", recurrences}};
  report["provenance"]["radii"] = radii_json(radii);
  report["provenance"]["censoring"] = {
      {"anchors", "only anchors whose r-ball lies inside the window are classified"},
      {"recurrences", "censored pairs agree on the whole known range; their size is a lower bound"}};

  if (p.dim() == 1 && p.has_tiles()) {
    Json ranks = Json::array(), h1 = Json::array();
    report["provenance"]["k"] = k_max;
    for (int k = 0; k <= k_max; ++k) {
      const auto g = apd::build_ap_graph(p, k);
      const auto info = apd::h1(g);
      ranks.push_back(info.rank_matrix);
      h1.push_back({{"k", k},
                    {"vertices", g.vertex_count},
                    {"edges", g.edge_count()},
                    {"components", apd::connected_components(g)},
                    {"rank_euler", info.rank_euler},
                    {"rank_matrix", info.rank_matrix},
                    {"collar_span", g.collar_span.str()},
                    {"loop_span", g.loop_span.str()}});
      write_aux(o, "graph_k" + std::to_string(k) + ".json", apd::graph_to_json(g).dump(2) + "\n");
    }
    report["h1"] = h1;
    report["h1_ranks"] = ranks;
  } else {
    report["h1"] = nullptr;
    report["h1_note"] = "graph complexes need a labelled one-dimensional sample";
  }
  write_aux(o, "recurrences.csv", rec_csv);
  if (o.svg) write_aux(o, "pattern.svg", apd::svg::point_plot(p));
  emit(o, "report.json", report);
  return kOk;
}

// ---- deformation commands ----

struct Deformed {
  Context context;
  apd::CocycleSpec spec;
  apd::Deformation d;
};

apd::Cochain build_cocycle(const apd::CocycleSpec& spec, const apd::ApGraph& g, long field, std::uint64_t seed) {
  if (spec.identity) return g.lengths;
  if (spec.random_amplitude) {
    if (!(*spec.random_amplitude > 0.0 && *spec.random_amplitude < 1.0))
      throw apd::ConfigError("random amplitude must lie in (0, 1)");
    std::mt19937_64 rng(seed);
    return apd::random_cocycle(g, *spec.random_amplitude, rng);
  }
  return apd::resolve_cocycle_table(spec, g, field);
}

std::pair<Context, apd::CocycleSpec> load_with_spec(const Options& o) {
  if (o.cocycle.empty()) throw apd::ConfigError(o.command + " needs --cocycle");
  auto spec = apd::cocycle_spec_from_json(apd::read_json_file(o.cocycle));
  if (o.k >= 0) spec.k = o.k;
  auto c = load_context(o, spec.rule);
  if (c.pattern->dim() != 1 || !c.pattern->has_tiles())
    throw apd::ConfigError("deformations need a labelled one-dimensional sample");
  return {std::move(c), std::move(spec)};
}

Deformed load_deformation(const Options& o) {
  auto [c, spec] = load_with_spec(o);
  const auto g = apd::build_ap_graph(*c.pattern, spec.k);
  auto f = build_cocycle(spec, g, c.pattern->field(), o.seed);
  auto d = apd::apply_deformation(c.pattern, spec.k, std::move(f));
  return {std::move(c), std::move(spec), std::move(d)};
}

ExactScalar max_length(const apd::PatternSample& p) {
  ExactScalar m;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) m = apd::max(m, p.gap(i));
  return m;
}

ExactScalar invert_radius(const Options& o, const apd::PatternSample& p) {
  if (!o.r.empty()) {
    ExactScalar r = ExactScalar::parse(o.r, p.field());
    if (r.sign() <= 0) throw apd::ConfigError("--r must be positive");
    return r;
  }
  return ExactScalar(2) * max_length(p);
}

std::vector<ExactScalar> default_derive_radii(const ExactScalar& limit) {
  std::vector<ExactScalar> out;
  for (long r : {1L, 2L, 4L, 8L, 16L, 32L})
    if (ExactScalar(r) < limit) out.push_back(ExactScalar(r));
  out.push_back(limit);
  return out;
}

// Geometric radii above the loop span, one substitution scale apart.
std::vector<ExactScalar> default_decay_radii(const apd::ApGraph& g, const apd::PatternSample& p,
                                             const std::optional<apd::SubstitutionRule>& rule) {
  ExactScalar factor = rule ? rule->lambda : ExactScalar(2);
  if (!(ExactScalar(1) < factor)) factor = ExactScalar(2);
  const double limit = (p.window().hi[0] - p.window().lo[0]).to_double() / 8.0;
  std::vector<ExactScalar> out;
  ExactScalar r = g.loop_span + ExactScalar(1);
  for (int j = 0; j < 8 && r.to_double() <= limit; ++j, r = r * factor) out.push_back(r);
  if (out.empty()) throw apd::WindowError("window too small for a decay profile above the loop span");
  return out;
}

std::vector<ExactScalar> decay_radii(const Options& o, const apd::ApGraph& g, const apd::PatternSample& p,
                                     const std::optional<apd::SubstitutionRule>& rule) {
  if (o.radii.empty()) return default_decay_radii(g, p, rule);
  return parse_radii(o.radii, p.field(), {});
}

bool single_gap(const apd::PatternSample& p) {
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    if (p.gap(i) != p.gap(0)) return false;
  return true;
}

Json deformation_json(const apd::Deformation& d) {
  return {{"k", d.graph.k},
          {"distortion", d.distortion.str()},
          {"distortion_approx", apd::number(d.distortion.to_double())},
          {"deformed_points", d.deformed->size()},
          {"first_source_index", d.first},
          {"collar_span", d.graph.collar_span.str()},
          {"loop_span", d.graph.loop_span.str()}};
}

Json scope_json(const apd::InvertScope& s) {
  Json j{{"r_prime", s.r_prime ? Json(s.r_prime->str()) : Json(nullptr)}, {"centres", s.centres}};
  if (s.witness) j["witness"] = {s.witness->first, s.witness->second};
  return j;
}

Json invert_json(const apd::InvertVerdict& v) {
  return {{"r", v.r.str()},
          {"searched_to", v.searched_to.str()},
          {"candidates", v.candidates.size()},
          {"verdict", v.found() ? "succeeded" : "failed"},
          {"anchors", scope_json(v.anchors)},
          {"midpoints", scope_json(v.midpoints)},
          {"scope_note", "anchors: centres in the source; midpoints: centres between neighbours (proxy for all of R)"}};
}

Json derive_json(const apd::DeriveBackVerdict& v) {
  Json probes = Json::array();
  for (const auto& pr : v.probes) {
    Json j{{"R", pr.radius.str()}, {"derivable", pr.derivable}, {"window_limited", pr.window_limited}};
    if (pr.witness) j["witness"] = {apd::vector_to_json(pr.witness->first), apd::vector_to_json(pr.witness->second)};
    probes.push_back(std::move(j));
  }
  return {{"R", v.radius ? Json(v.radius->str()) : Json(nullptr)},
          {"probes", probes},
          {"centre_note", "centres are points of both samples and midpoints of neighbours"}};
}

Json decay_json(const std::vector<apd::DecayRow>& rows) {
  Json out = Json::array();
  for (std::size_t j = 0; j < rows.size(); ++j) {
    Json row{{"r", rows[j].radius.str()}, {"sup", apd::number(rows[j].sup)}, {"count", rows[j].count},
             {"censored", rows[j].censored}};
    row["ratio"] = (j > 0 && rows[j - 1].sup > 0) ? apd::number(rows[j].sup / rows[j - 1].sup) : Json(nullptr);
    out.push_back(std::move(row));
  }
  return out;
}

Json epsilon_json(const apd::EpsilonBound& e) {
  return {{"epsilon", apd::number(e.epsilon)}, {"t_cap", apd::number(e.t_cap)}, {"censored", e.censored}};
}

// phi - id is bounded exactly when f - len is a coboundary. Without it the
// deformed positions drift and a pass only reflects window saturation.
Json bounded_displacement(const apd::Deformation& d) {
  apd::Cochain diff;
  for (std::size_t e = 0; e < d.graph.edge_count(); ++e) diff.push_back(d.cocycle[e] - d.graph.lengths[e]);
  const bool ok = apd::solve_coboundary(d.graph, diff).has_value();
  Json j{{"bounded_displacement", ok}};
  if (!ok) j["note"] = "f - len is not a coboundary; passing radii reflect window saturation only";
  return j;
}

void periodicity_notes(const apd::Deformation& d, Json& report) {
  Json notes = Json::array();
  if (single_gap(*d.deformed))
    notes.push_back("deformed sample is periodic (one gap value " + d.deformed->gap(0).str() +
                    "); it cannot determine the source");
  report["notes"] = notes;
}

int cmd_deform(const Options& o) {
  const Deformed df = load_deformation(o);
  const apd::Deformation& d = df.d;
  const ExactScalar r = invert_radius(o, *d.source);
  const ExactScalar search = ExactScalar::parse(o.search, d.source->field());

  Json report{{"provenance", provenance(o, df.context)}, {"deformation", deformation_json(d)}};
  report["provenance"]["k"] = d.graph.k;

  std::optional<apd::EpsilonBound> eps;
  try {
    eps = apd::epsilon_bound(*d.source, r);
    report["epsilon_bound"] = epsilon_json(*eps);
  } catch (const apd::WindowError& e) {
    report["epsilon_bound"] = nullptr;
    report["epsilon_note"] = e.what();
  }
  report["within_epsilon"] = eps ? Json(d.distortion.to_double() < eps->epsilon) : Json(nullptr);

  const auto inv = apd::invert_check(d, r, search);
  report["invert_verdict"] = invert_json(inv);
  report["r_prime"] = inv.anchors.r_prime ? Json(inv.anchors.r_prime->str()) : Json(nullptr);

  const auto back = apd::derive_back_check(d, default_derive_radii(inv.searched_to));
  report["derive_back"] = derive_json(back);
  report["derive_back"]["precondition"] = bounded_displacement(d);
  report["derive_back_R"] = back.radius ? Json(back.radius->str()) : Json(nullptr);

  const auto radii = decay_radii(o, d.graph, *d.source, df.context.rule);
  const auto rows = apd::negligibility_profile(d, radii);
  report["negligibility"] = decay_json(rows);
  report["provenance"]["radii"] = radii_json(radii);
  report["provenance"]["invert_r"] = r.str();
  report["provenance"]["search"] = search.str();
  periodicity_notes(d, report);

  write_aux(o, "cochain.csv", apd::cochain_csv(d.graph, d.cocycle));
  write_aux(o, "decay.csv", apd::decay_csv(rows));
  write_aux(o, "deformed.json", apd::pattern_to_json(*d.deformed).dump(2) + "\n");
  if (o.svg) {
    write_aux(o, "before_after.svg", apd::svg::before_after(*d.source, *d.deformed));
    write_aux(o, "decay.svg", apd::svg::decay_plot(rows));
  }
  emit(o, "report.json", report);
  return kOk;
}

int cmd_invert_check(const Options& o) {
  const Deformed df = load_deformation(o);
  const apd::Deformation& d = df.d;
  const ExactScalar r = invert_radius(o, *d.source);
  const ExactScalar search = ExactScalar::parse(o.search, d.source->field());
  const auto inv = apd::invert_check(d, r, search);
  Json report{{"provenance", provenance(o, df.context)},
              {"deformation", deformation_json(d)},
              {"invert_verdict", invert_json(inv)},
              {"r_prime", inv.anchors.r_prime ? Json(inv.anchors.r_prime->str()) : Json(nullptr)}};
  report["provenance"]["k"] = d.graph.k;
  report["provenance"]["invert_r"] = r.str();
  report["provenance"]["search"] = search.str();
  periodicity_notes(d, report);
  emit(o, "report.json", report);
  return kOk;
}

int cmd_derive_check(const Options& o) {
  const Deformed df = load_deformation(o);
  const apd::Deformation& d = df.d;
  const ExactScalar search = ExactScalar::parse(o.search, d.source->field());
  const auto radii = o.radii.empty() ? default_derive_radii(search) : parse_radii(o.radii, d.source->field(), {});
  const auto back = apd::derive_back_check(d, radii);
  Json derive = derive_json(back);
  derive["precondition"] = bounded_displacement(d);
  Json report{{"provenance", provenance(o, df.context)},
              {"deformation", deformation_json(d)},
              {"derive_back", derive},
              {"derive_back_R", back.radius ? Json(back.radius->str()) : Json(nullptr)}};
  report["provenance"]["k"] = d.graph.k;
  report["provenance"]["radii"] = radii_json(radii);
  periodicity_notes(d, report);
  emit(o, "report.json", report);
  return kOk;
}

// The cocycle is integrated directly, so it need not be a valid deformation.
int cmd_negligibility(const Options& o) {
  auto [c, spec] = load_with_spec(o);
  const auto g = apd::build_ap_graph(*c.pattern, spec.k);
  const auto f = build_cocycle(spec, g, c.pattern->field(), o.seed);
  const auto psi = apd::integrate_cocycle(f, g, c.pattern, static_cast<std::size_t>(spec.k));
  const auto radii = decay_radii(o, g, *c.pattern, c.rule);
  const auto rows = apd::decay_profile(psi, g, radii);
  const bool coboundary = apd::solve_coboundary(g, f).has_value();
  Json report{{"provenance", provenance(o, c)}, {"decay", decay_json(rows)}, {"coboundary", coboundary}};
  report["provenance"]["k"] = spec.k;
  report["provenance"]["radii"] = radii_json(radii);
  report["provenance"]["loop_span"] = g.loop_span.str();
  report["provenance"]["censoring"] = "censored recurrences enter with their lower-bound size";
  write_aux(o, "cochain.csv", apd::cochain_csv(g, f));
  write_aux(o, "decay.csv", apd::decay_csv(rows));
  write_aux(o, "integrated.csv", apd::site_function_csv(psi));
  if (o.svg) write_aux(o, "decay.svg", apd::svg::decay_plot(rows));
  emit(o, "report.json", report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations on aperiodic point patterns"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--rule", o.rule, "Rule JSON file or built-in name (fibonacci, silver, period-doubling, periodic)");
    sub->add_option("--seed", o.seed, "Seed for random cocycles");
    sub->add_option("--out", o.out, "Output directory (report.json and side files); stdout when omitted");
    sub->add_flag("--svg", o.svg, "Also write SVG plots into --out");
  };
  auto add_pattern = [&](CLI::App* sub) {
    sub->add_option("--pattern", o.pattern, "Pattern JSON file")->check(CLI::ExistingFile);
    sub->add_option("--iterations", o.iterations, "Substitution iterations when realizing --rule (0: at least 600 tiles)");
  };

  auto* gen = app.add_subcommand("generate", "Realize a substitution as a point pattern");
  add_common(gen);
  gen->add_option("--k", o.k, "Substitution iterations");

  auto* analyze = app.add_subcommand("analyze", "Patch classes, A_P table, recurrences and H^1 ranks");
  add_common(analyze);
  add_pattern(analyze);
  analyze->add_option("--radii", o.radii, "Comma-separated exact radii");
  analyze->add_option("--k", o.k, "Largest collar level for the graph complexes (default 2)");

  std::vector<CLI::App*> deformers;
  deformers.push_back(app.add_subcommand("deform", "Apply a cocycle and report invertibility and negligibility"));
  deformers.push_back(app.add_subcommand("invert-check", "Invertibility of the patch map of a deformation"));
  deformers.push_back(app.add_subcommand("derive-check", "Local derivability of the source from the deformed sample"));
  deformers.push_back(app.add_subcommand("negligibility", "Decay profile of an integrated cocycle"));
  for (auto* sub : deformers) {
    add_common(sub);
    add_pattern(sub);
    sub->add_option("--cocycle", o.cocycle, "Cocycle spec JSON")->check(CLI::ExistingFile);
    sub->add_option("--k", o.k, "Collar level (overrides the spec)");
    sub->add_option("--radii", o.radii, "Comma-separated exact radii");
    sub->add_option("--r", o.r, "Patch radius for the invertibility check (default: twice the longest tile)");
    sub->add_option("--search", o.search, "Largest r' searched");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    if (o.command == "generate") return cmd_generate(o);
    if (o.command == "analyze") return cmd_analyze(o);
    if (o.command == "deform") return cmd_deform(o);
    if (o.command == "invert-check") return cmd_invert_check(o);
    if (o.command == "derive-check") return cmd_derive_check(o);
    if (o.command == "negligibility") return cmd_negligibility(o);
  } catch (const apd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const apd::PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const apd::WindowError& e) {
    std::cerr << "window too small: " << e.what() << "\n";
    return kWindow;
  } catch (const apd::InadmissibleError& e) {
    std::cerr << "inadmissible cocycle: " << e.what() << "\n";
    return kInadmissible;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
