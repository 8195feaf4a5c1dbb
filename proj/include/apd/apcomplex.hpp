#ifndef APD_APCOMPLEX_HPP
#define APD_APCOMPLEX_HPP

// Level-k Anderson-Putnam-Gaehler graphs of 1D labelled tilings: edges are
// k-collared tiles, endpoints are glued whenever the two collared tiles occur
// next to each other in the sample. In 1D every 1-cochain is a cocycle, so
// H^1 = C^1 / im(delta^0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apd/equivariance.hpp"
#include "apd/error.hpp"
#include "apd/exactnum.hpp"
#include "apd/linalg.hpp"
#include "apd/patterns.hpp"

namespace apd {

inline constexpr std::size_t kNoEdge = static_cast<std::size_t>(-1);

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Cochains are vectors indexed by edge.
using Cochain = std::vector<ExactScalar>;

struct ApGraph {
  int k = 0;
  std::vector<std::string> edges;         // collared words of length 2k + 1, sorted
  std::vector<std::size_t> source;        // vertex index per edge
  std::vector<std::size_t> target;
  std::size_t vertex_count = 0;
  std::vector<std::size_t> occurrence;    // edge per tile, kNoEdge when uncollared
  std::vector<ExactScalar> lengths;       // geometric length per edge
  ExactScalar collar_span;                // k * shortest tile
  ExactScalar loop_span;                  // (k + 1) * longest tile

  std::size_t edge_count() const { return edges.size(); }
  char letter(std::size_t e) const { return edges[e][static_cast<std::size_t>(k)]; }
  std::size_t edge_index(const std::string& word) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), word);
    if (it == edges.end() || *it != word) return kNoEdge;
    return static_cast<std::size_t>(it - edges.begin());
  }
  /// Vertex at point i (between tiles i-1 and i), when either tile is collared.
  std::optional<std::size_t> vertex_at(std::size_t point) const {
    if (point < occurrence.size() && occurrence[point] != kNoEdge) return source[occurrence[point]];
    if (point >= 1 && point - 1 < occurrence.size() && occurrence[point - 1] != kNoEdge)
      return target[occurrence[point - 1]];
    return std::nullopt;
  }
};

inline ApGraph build_ap_graph(const PatternSample& p, int k) {
  p.require_dim1("build_ap_graph");
  if (!p.has_tiles()) throw PreconditionError("AP graphs need tile labels");
  if (k < 0) throw PreconditionError("collar level must be non-negative");
  const std::string& tiles = p.tiles();
  const std::size_t n = tiles.size();
  const std::size_t kk = static_cast<std::size_t>(k);
  if (n < 2 * kk + 2) throw WindowError("sample too short for " + std::to_string(k) + "-collared tiles");
  ApGraph g;
  g.k = k;
  std::vector<std::string> words(n);
  for (std::size_t i = kk; i + kk < n; ++i) words[i] = tiles.substr(i - kk, 2 * kk + 1);
  {
    std::vector<std::string> distinct;
    for (std::size_t i = kk; i + kk < n; ++i) distinct.push_back(words[i]);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    g.edges = std::move(distinct);
  }
  g.occurrence.assign(n, kNoEdge);
  for (std::size_t i = kk; i + kk < n; ++i) g.occurrence[i] = g.edge_index(words[i]);

  // Endpoint slots: 2e = source of e, 2e + 1 = target of e.
  const std::size_t e_count = g.edges.size();
  detail::UnionFind uf(2 * e_count);
  for (std::size_t i = kk; i + 1 + kk < n; ++i) uf.unite(2 * g.occurrence[i] + 1, 2 * g.occurrence[i + 1]);
  std::map<std::size_t, std::size_t> vertex_of_root;
  g.source.resize(e_count);
  g.target.resize(e_count);
  for (std::size_t e = 0; e < e_count; ++e) {
    g.source[e] = vertex_of_root.emplace(uf.find(2 * e), vertex_of_root.size()).first->second;
    g.target[e] = vertex_of_root.emplace(uf.find(2 * e + 1), vertex_of_root.size()).first->second;
  }
  g.vertex_count = vertex_of_root.size();

  g.lengths.resize(e_count);
  std::vector<bool> seen(e_count, false);
  for (std::size_t i = kk; i + kk < n; ++i) {
    const std::size_t e = g.occurrence[i];
    if (!seen[e]) {
      g.lengths[e] = p.gap(i);
      seen[e] = true;
    } else if (g.lengths[e] != p.gap(i)) {
      throw PreconditionError("tiles with the same label have different lengths");
    }
  }
  ExactScalar shortest = p.gap_values().front(), longest = p.gap_values().back();
  g.collar_span = ExactScalar(static_cast<long>(k)) * shortest;
  g.loop_span = ExactScalar(static_cast<long>(k) + 1) * longest;
  return g;
}

/// alpha_k: Gamma^{k+1} -> Gamma^k, reducing each collar by one letter on each side.
struct ForgetMap {
  std::vector<std::size_t> edge_map;
  std::vector<std::size_t> vertex_map;
  bool surjective = false;
};

inline ForgetMap forget_map(const ApGraph& fine, const ApGraph& coarse) {
  if (fine.k != coarse.k + 1) throw PreconditionError("forget_map needs consecutive levels");
  ForgetMap m;
  m.edge_map.resize(fine.edge_count());
  constexpr std::size_t unset = kNoEdge;
  m.vertex_map.assign(fine.vertex_count, unset);
  std::vector<bool> hit(coarse.edge_count(), false);
  auto assign = [&](std::size_t v, std::size_t w) {
    if (m.vertex_map[v] == unset) m.vertex_map[v] = w;
    else if (m.vertex_map[v] != w) throw WindowError("forget map is not a graph morphism (window censoring)");
  };
  for (std::size_t e = 0; e < fine.edge_count(); ++e) {
    const std::string reduced = fine.edges[e].substr(1, fine.edges[e].size() - 2);
    const std::size_t c = coarse.edge_index(reduced);
    if (c == kNoEdge) throw WindowError("collar reduction '" + reduced + "' is missing at the coarser level");
    m.edge_map[e] = c;
    hit[c] = true;
    assign(fine.source[e], coarse.source[c]);
    assign(fine.target[e], coarse.target[c]);
  }
  m.surjective = std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  return m;
}

/// f o alpha: pulls a coarse cochain back to the finer level.
inline Cochain pull_back(const ForgetMap& alpha, const Cochain& coarse) {
  Cochain out;
  out.reserve(alpha.edge_map.size());
  for (auto c : alpha.edge_map) out.push_back(coarse[c]);
  return out;
}

/// delta^0 as an E x V matrix: (delta g)(e) = g(t(e)) - g(s(e)).
template <class F = Rational>
Matrix<F> coboundary_matrix(const ApGraph& g) {
  Matrix<F> m(g.edge_count(), g.vertex_count);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    m(e, g.target[e]) += F(1);
    m(e, g.source[e]) -= F(1);
  }
  return m;
}

inline Cochain coboundary(const ApGraph& g, const std::vector<ExactScalar>& vertex_values) {
  if (vertex_values.size() != g.vertex_count) throw PreconditionError("vertex function has the wrong size");
  Cochain out;
  for (std::size_t e = 0; e < g.edge_count(); ++e) out.push_back(vertex_values[g.target[e]] - vertex_values[g.source[e]]);
  return out;
}

inline std::size_t connected_components(const ApGraph& g) {
  detail::UnionFind uf(g.vertex_count);
  for (std::size_t e = 0; e < g.edge_count(); ++e) uf.unite(g.source[e], g.target[e]);
  std::size_t c = 0;
  for (std::size_t v = 0; v < g.vertex_count; ++v)
    if (uf.find(v) == v) ++c;
  return c;
}

struct H1Info {
  std::size_t rank_euler = 0;   // E - V + C
  std::size_t rank_matrix = 0;  // E - rank(delta^0)
  std::vector<Cochain> basis;   // unit cochains spanning a complement of im(delta^0)
};

inline H1Info h1(const ApGraph& g) {
  H1Info info;
  info.rank_euler = g.edge_count() + connected_components(g) - g.vertex_count;
  const auto d = coboundary_matrix<Rational>(g);
  const std::size_t rk = d.rank();
  info.rank_matrix = g.edge_count() - rk;
  // Extend the column space of delta^0 by unit vectors.
  Matrix<Rational> span = d;
  std::size_t current = rk;
  for (std::size_t e = 0; e < g.edge_count() && info.basis.size() < info.rank_matrix; ++e) {
    Matrix<Rational> trial(span.rows(), span.cols() + 1);
    for (std::size_t i = 0; i < span.rows(); ++i) {
      for (std::size_t j = 0; j < span.cols(); ++j) trial(i, j) = span(i, j);
      trial(i, span.cols()) = i == e ? 1 : 0;
    }
    const std::size_t rt = trial.rank();
    if (rt > current) {
      current = rt;
      span = std::move(trial);
      Cochain unit(g.edge_count(), ExactScalar(0));
      unit[e] = ExactScalar(1);
      info.basis.push_back(std::move(unit));
    }
  }
  return info;
}

/// Vertex function g with delta^0 g = f, if any.
inline std::optional<std::vector<ExactScalar>> solve_coboundary(const ApGraph& g, const Cochain& f) {
  if (f.size() != g.edge_count()) throw PreconditionError("cochain has the wrong size");
  return coboundary_matrix<ExactScalar>(g).solve(f);
}

/// J(d phi)(e) = phi(t(e~)) - phi(s(e~)) for any occurrence e~ of e. Every
/// occurrence must give the same value.
inline Cochain j_map(const SiteFunction<ExactScalar>& phi, const ApGraph& g, const ExactScalar& r) {
  if (g.collar_span < r) throw PreconditionError("collar span " + g.collar_span.str() + " is smaller than the range " + r.str());
  std::vector<std::optional<ExactScalar>> values(g.edge_count());
  for (std::size_t i = 0; i < g.occurrence.size(); ++i) {
    const std::size_t e = g.occurrence[i];
    if (e == kNoEdge) continue;
    const ExactScalar* a = phi.find(i);
    const ExactScalar* b = phi.find(i + 1);
    if (!a || !b) continue;
    ExactScalar inc = *b - *a;
    if (!values[e]) values[e] = std::move(inc);
    else if (*values[e] != inc)
      throw PreconditionError("occurrences of edge '" + g.edges[e] + "' disagree; collar level too small for the range");
  }
  Cochain out;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!values[e]) throw WindowError("edge '" + g.edges[e] + "' has no occurrence inside the function's domain");
    out.push_back(*values[e]);
  }
  return out;
}

/// psi(x0) = 0 and psi(p_{i+1}) = psi(p_i) + f(edge of tile i) over the
/// collared range of points k .. N-1-k.
inline SiteFunction<ExactScalar> integrate_cocycle(const Cochain& f, const ApGraph& g, PatternPtr p, std::size_t base) {
  if (f.size() != g.edge_count()) throw PreconditionError("cochain has the wrong size");
  const std::size_t kk = static_cast<std::size_t>(g.k);
  if (p->size() < 2 * kk + 2) throw WindowError("sample too short for the collar level");
  const std::size_t first = kk, last = p->size() - 1 - kk;  // inclusive
  if (base < first || base > last) throw PreconditionError("base point lies outside the collared range");
  SiteFunction<ExactScalar> psi;
  psi.pattern = std::move(p);
  psi.domain.resize(last - first + 1);
  std::iota(psi.domain.begin(), psi.domain.end(), first);
  psi.values.assign(psi.domain.size(), ExactScalar(0));
  for (std::size_t i = base; i < last; ++i) psi.values[i + 1 - first] = psi.values[i - first] + f[g.occurrence[i]];
  for (std::size_t i = base; i > first; --i) psi.values[i - 1 - first] = psi.values[i - first] - f[g.occurrence[i - 1]];
  return psi;
}

/// A recurrence with its loop value psi(x2) - psi(x1).
struct LoopValue {
  Recurrence recurrence;
  ExactScalar value;
};

/// Values on recurrences whose size exceeds the loop span (so that both
/// endpoints sit on the same vertex and the path is a closed loop).
inline std::vector<LoopValue> evaluate_on_recurrences(const SiteFunction<ExactScalar>& psi, const ApGraph& g,
                                                      const std::vector<Recurrence>& recurrences) {
  const ExactScalar span_sq = g.loop_span * g.loop_span;
  std::vector<LoopValue> out;
  for (const auto& rec : recurrences) {
    if (!(span_sq < rec.size_sq)) continue;
    const ExactScalar* a = psi.find(rec.first);
    const ExactScalar* b = psi.find(rec.second);
    if (!a || !b) continue;
    out.push_back({rec, *b - *a});
  }
  return out;
}

struct DecayRow {
  ExactScalar radius;
  double sup = 0.0;            // sup |value| over recurrences of size >= radius
  std::size_t count = 0;       // recurrences counted
  std::size_t censored = 0;    // censored recurrences counted (size only bounded below)
};

/// sup{|psi(x2) - psi(x1)| : recurrence size >= r} for each radius, streaming
/// over all anchor pairs. Radii below the loop span are rejected.
inline std::vector<DecayRow> decay_profile(const SiteFunction<ExactScalar>& psi, const ApGraph& g,
                                           std::vector<ExactScalar> radii) {
  if (radii.empty()) return {};
  std::sort(radii.begin(), radii.end());
  if (!(g.loop_span < radii.front()))
    throw PreconditionError("decay radii must exceed the loop span " + g.loop_span.str());
  std::vector<ExactScalar> sq;
  for (const auto& r : radii) sq.push_back(r * r);
  std::vector<DecayRow> rows(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) rows[j].radius = radii[j];
  const PatternSample& p = *psi.pattern;
  for_each_agreement(p, radii.front(), [&](const Recurrence& rec) {
    const ExactScalar* a = psi.find(rec.first);
    const ExactScalar* b = psi.find(rec.second);
    if (!a || !b) return;
    const double v = std::fabs((*b - *a).to_double());
    for (std::size_t j = 0; j < radii.size(); ++j) {
      if (rec.size_sq < sq[j]) break;
      rows[j].sup = std::max(rows[j].sup, v);
      ++rows[j].count;
      if (rec.censored) ++rows[j].censored;
    }
  });
  return rows;
}

}  // namespace apd

#endif  // APD_APCOMPLEX_HPP
