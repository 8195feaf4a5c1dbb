#ifndef APD_DEFORM_HPP
#define APD_DEFORM_HPP

// Shape deformations P -> phi(P) of 1D tilings given by a cocycle on the
// collared tiles, realized piecewise-linearly between vertices, plus the
// product construction in 2D. Checks for invertibility, derivability back
// and the two hull maps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "apd/apcomplex.hpp"
#include "apd/equivariance.hpp"
#include "apd/error.hpp"
#include "apd/exactnum.hpp"
#include "apd/patterns.hpp"

namespace apd {

struct Deformation {
  PatternPtr source;
  ApGraph graph;
  Cochain cocycle;
  std::size_t first = 0;   // source index of deformed point 0
  PatternPtr deformed;
  ExactScalar distortion;  // max |f(e) - len(e)| / len(e)

  std::size_t last() const { return first + deformed->size() - 1; }
  std::size_t deformed_index(std::size_t source_index) const { return source_index - first; }
  bool in_domain(std::size_t source_index) const { return source_index >= first && source_index <= last(); }

  /// Piecewise-linear phi on [p_first, p_last].
  ExactScalar phi(const ExactScalar& x) const {
    const PatternSample& p = *source;
    if (x < p.x(first) || p.x(last()) < x) throw WindowError("phi is only known on the deformed range");
    std::size_t lo = first, hi = last();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (x < p.x(mid)) hi = mid;
      else lo = mid;
    }
    if (x == p.x(lo)) return deformed->x(lo - first);
    const ExactScalar slope = (deformed->x(hi - first) - deformed->x(lo - first)) / (p.x(hi) - p.x(lo));
    return deformed->x(lo - first) + slope * (x - p.x(lo));
  }
  /// Bi-Lipschitz constant (1 - distortion)^-1.
  ExactScalar lambda() const {
    if (!(distortion < ExactScalar(1))) throw PreconditionError("distortion must be below 1");
    return (ExactScalar(1) - distortion).inverse();
  }
};

/// Cochain from a table of collared words. Words absent from the sample are ignored.
inline Cochain cochain_from_words(const ApGraph& g, const std::map<std::string, ExactScalar>& table) {
  Cochain f;
  for (const auto& w : g.edges) {
    auto it = table.find(w);
    if (it == table.end()) throw ConfigError("cocycle has no value for edge class '" + w + "'");
    f.push_back(it->second);
  }
  return f;
}

/// Cochain depending only on the central letter of each collared word.
inline Cochain cochain_from_letters(const ApGraph& g, const std::map<char, ExactScalar>& table) {
  Cochain f;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto it = table.find(g.letter(e));
    if (it == table.end()) throw ConfigError(std::string("cocycle has no value for letter '") + g.letter(e) + "'");
    f.push_back(it->second);
  }
  return f;
}

inline Deformation apply_deformation(PatternPtr p, int k, Cochain f) {
  Deformation d;
  d.graph = build_ap_graph(*p, k);
  if (f.size() != d.graph.edge_count()) throw PreconditionError("cocycle has the wrong number of edge classes");
  for (std::size_t e = 0; e < f.size(); ++e)
    if (f[e].sign() <= 0)
      throw InadmissibleError("edge class '" + d.graph.edges[e] + "' gets non-positive length " + f[e].str());
  const std::size_t kk = static_cast<std::size_t>(k);
  d.first = kk;
  const std::size_t last = p->size() - 1 - kk;
  std::vector<ExactVector> pts;
  pts.reserve(last - kk + 1);
  ExactScalar x = p->x(kk);
  pts.emplace_back(x);
  for (std::size_t i = kk; i < last; ++i) {
    x += f[d.graph.occurrence[i]];
    pts.emplace_back(x);
  }
  Box window{pts.front(), pts.back()};
  d.deformed = std::make_shared<const PatternSample>(p->field(), std::move(pts), std::move(window),
                                                     p->tiles().substr(kk, last - kk));
  ExactScalar worst;
  for (std::size_t e = 0; e < f.size(); ++e) worst = max(worst, (f[e] - d.graph.lengths[e]).abs() / d.graph.lengths[e]);
  d.distortion = worst;
  d.cocycle = std::move(f);
  d.source = std::move(p);
  return d;
}

/// Edge class of a product tiling: an edge along `axis` carrying tile
/// `letter`, sitting on the far side of the perpendicular tile `across`.
struct ProductEdgeClass {
  int axis = 0;  // 0 horizontal, 1 vertical
  char letter = 0;
  char across = 0;
  auto operator<=>(const ProductEdgeClass&) const = default;
};

struct ProductDeformation {
  PatternSample deformed;
  ExactScalar distortion_sq;      // max |f(e) - e|^2 / |e|^2
  std::size_t rectangles = 0;     // closure conditions checked
};

/// Deforms the product of two labelled 1D samples. Vertex (i, j) for i, j >= 1
/// maps to (x_1, y_1) plus the edge vectors along any lattice path; every
/// observed rectangle must close exactly.
inline ProductDeformation apply_product_deformation(const PatternSample& xs, const PatternSample& ys,
                                                    const std::map<ProductEdgeClass, ExactVector>& f) {
  xs.require_dim1("apply_product_deformation");
  ys.require_dim1("apply_product_deformation");
  if (!xs.has_tiles() || !ys.has_tiles()) throw PreconditionError("product deformation needs tile labels");
  const std::size_t nx = xs.size() - 1, ny = ys.size() - 1;  // tiles per axis
  if (nx < 2 || ny < 2) throw WindowError("product sample too small");
  auto lookup = [&](int axis, char letter, char across) -> const ExactVector& {
    auto it = f.find({axis, letter, across});
    if (it == f.end())
      throw ConfigError(std::string("no vector for ") + (axis == 0 ? "horizontal" : "vertical") + " edge '" + letter +
                        "' across '" + across + "'");
    if (it->second.dim() != 2) throw ConfigError("product edge vectors must be 2D");
    return it->second;
  };
  auto h = [&](std::size_t i, std::size_t j) -> const ExactVector& { return lookup(0, xs.tiles()[i], ys.tiles()[j - 1]); };
  auto v = [&](std::size_t i, std::size_t j) -> const ExactVector& { return lookup(1, ys.tiles()[j], xs.tiles()[i - 1]); };

  ProductDeformation out{PatternSample(0, {ExactVector(ExactScalar(0), ExactScalar(0))},
                                       Box{ExactVector(ExactScalar(0), ExactScalar(0)), ExactVector(ExactScalar(0), ExactScalar(0))}),
                         ExactScalar(), 0};
  for (std::size_t i = 1; i < nx; ++i)
    for (std::size_t j = 1; j < ny; ++j) {
      const ExactVector loop = h(i, j) + v(i + 1, j) - h(i, j + 1) - v(i, j);
      if (!loop.is_zero())
        throw InadmissibleError("closure fails on the rectangle at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      ++out.rectangles;
    }
  // Integrate along row 1, then up each column.
  std::vector<ExactVector> pts;
  std::vector<ExactVector> row(nx);
  row[0] = ExactVector(xs.x(1), ys.x(1));
  for (std::size_t i = 1; i + 1 < nx + 1; ++i) row[i] = row[i - 1] + h(i, 1);
  for (std::size_t i = 1; i <= nx; ++i) {
    ExactVector cur = row[i - 1];
    pts.push_back(cur);
    for (std::size_t j = 1; j < ny; ++j) {
      cur = cur + v(i, j);
      pts.push_back(cur);
    }
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t t = 1; t < pts.size(); ++t)
    if (pts[t] == pts[t - 1]) throw InadmissibleError("deformed vertices collide at " + pts[t].str());
  ExactScalar lo0 = pts[0][0], hi0 = pts[0][0], lo1 = pts[0][1], hi1 = pts[0][1];
  for (const auto& q : pts) {
    lo0 = min(lo0, q[0]);
    hi0 = max(hi0, q[0]);
    lo1 = min(lo1, q[1]);
    hi1 = max(hi1, q[1]);
  }
  const long field = xs.field() != 0 ? xs.field() : ys.field();
  out.deformed = PatternSample(field, std::move(pts), Box{ExactVector(lo0, lo1), ExactVector(hi0, hi1)});

  for (const auto& [cls, vec] : f) {
    const PatternSample& axis = cls.axis == 0 ? xs : ys;
    std::optional<ExactScalar> len;
    for (std::size_t t = 0; t + 1 < axis.size(); ++t)
      if (axis.tiles()[t] == cls.letter) {
        len = axis.gap(t);
        break;
      }
    if (!len) continue;
    const ExactVector e = cls.axis == 0 ? ExactVector(*len, ExactScalar(0)) : ExactVector(ExactScalar(0), *len);
    out.distortion_sq = max(out.distortion_sq, (vec - e).norm_sq() / e.norm_sq());
  }
  return out;
}

/// Result of the invertibility bound search.
struct EpsilonBound {
  double epsilon = 0.0;     // largest tested t where the inequality holds
  double t_cap = 1.0;       // t beyond which A_P leaves the window
  bool censored = false;    // inequality still holds at the cap
  std::size_t evaluations = 0;
};

namespace detail {

/// 2 t (1-t)^-2 r <= A_P((1-t)^-2 r), decided exactly with t rational.
inline bool epsilon_condition(const PatternSample& p, const ExactScalar& r, double t) {
  const ExactScalar tq(rational_from_double(t));
  const ExactScalar one_minus = ExactScalar(1) - tq;
  const ExactScalar s = r / (one_minus * one_minus);
  const auto offsets = patch_offset_union(p, s);
  if (offsets.size() < 2) return true;  // A_P is infinite
  const ExactScalar lhs = ExactScalar(2) * tq * s;
  return lhs * lhs <= compute_a_sq(p, s);
}

/// Largest radius at which some point is still a safe anchor.
inline ExactScalar max_safe_radius(const PatternSample& p) {
  ExactScalar best;
  for (std::size_t i = 0; i < p.size(); ++i) best = max(best, p.window().margin(p.point(i)));
  return best;
}

}  // namespace detail

/// eps = sup{0 < t < 1 : 2t(1-t)^-2 r <= A_P((1-t)^-2 r)} by bisection to `tol`.
inline EpsilonBound epsilon_bound(const PatternSample& p, const ExactScalar& r, double tol = 1e-6) {
  if (r.sign() <= 0) throw PreconditionError("epsilon_bound needs a positive radius");
  const ExactScalar s_max = detail::max_safe_radius(p);
  if (s_max < r) throw WindowError("radius " + r.str() + " exceeds the window");
  EpsilonBound out;
  out.t_cap = std::min(1.0 - std::sqrt(r.to_double() / s_max.to_double()), 1.0 - 1e-9);
  // Keep the cap inside the window after rounding t to a rational.
  auto radius_at = [&](double t) {
    const ExactScalar om = ExactScalar(1) - ExactScalar(rational_from_double(t));
    return r / (om * om);
  };
  while (out.t_cap > 0 && s_max < radius_at(out.t_cap)) out.t_cap -= tol;
  double lo = 0.0, hi = out.t_cap;
  ++out.evaluations;
  if (hi <= 0.0 || detail::epsilon_condition(p, r, hi)) {
    out.censored = hi > 0.0;
    out.epsilon = std::max(hi, 0.0);
    return out;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ++out.evaluations;
    if (detail::epsilon_condition(p, r, mid)) lo = mid;
    else hi = mid;
  }
  out.epsilon = lo;
  return out;
}

/// One scope of the invertibility check.
struct InvertScope {
  std::optional<ExactScalar> r_prime;  // smallest passing candidate
  std::size_t centres = 0;             // centres used at the reported (or last) candidate
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // source indices, at the last failing candidate
};

struct InvertVerdict {
  ExactScalar r;
  ExactScalar searched_to;             // r_max_search capped by the deformed window
  std::vector<ExactScalar> candidates; // r and the patch steps of phi(P) in (r, searched_to]
  InvertScope anchors;                 // centres x in P
  InvertScope midpoints;               // centres halfway between neighbours
  bool found() const { return anchors.r_prime.has_value(); }
};

namespace detail {

/// Distinct offset lengths of phi(P) in (lo, hi]: the radii at which r'-patches change.
inline std::vector<ExactScalar> patch_steps(const PatternSample& q, const ExactScalar& lo, const ExactScalar& hi) {
  std::vector<ExactScalar> out;
  for (const auto& o : patch_offset_union(q, hi)) {
    const ExactScalar len = o[0].abs();
    if (lo < len && len <= hi) out.push_back(len);
  }
  std::sort(out.begin(), out.end(), StructuralLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::sort(out.begin(), out.end());
  return out;
}

struct Centre {
  ExactVector source;
  ExactVector image;
  std::size_t index;  // source index of the left (or only) point
};

/// Does r'-patch equality at the images force r-patch equality at the sources?
inline bool invert_holds(const Deformation& d, const std::vector<Centre>& centres, const ExactScalar& r,
                         const ExactScalar& rp, InvertScope& scope) {
  std::vector<std::size_t> use;
  for (std::size_t c = 0; c < centres.size(); ++c)
    if (d.source->ball_inside(centres[c].source, r) && d.deformed->ball_inside(centres[c].image, rp)) use.push_back(c);
  scope.centres = use.size();
  if (use.size() < 2) return true;
  std::vector<PatchKey> image_keys(use.size()), source_keys(use.size());
  parallel_for(use.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      image_keys[k] = patch_key(*d.deformed, centres[use[k]].image, rp);
      source_keys[k] = patch_key(*d.source, centres[use[k]].source, r);
    }
  });
  std::map<PatchKey, std::size_t> rep;
  for (std::size_t k = 0; k < use.size(); ++k) {
    auto [it, fresh] = rep.emplace(image_keys[k], k);
    if (!fresh && !(source_keys[it->second] == source_keys[k])) {
      scope.witness = std::pair{centres[use[it->second]].index, centres[use[k]].index};
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Smallest tested r' such that equal r'-patches of phi(P) at phi(x), phi(y)
/// force equal r-patches of P at x, y. Reported for centres x, y in P and,
/// separately, for midpoints between neighbours.
inline InvertVerdict invert_check(const Deformation& d, const ExactScalar& r, const ExactScalar& r_max_search) {
  InvertVerdict v;
  v.r = r;
  v.searched_to = min(r_max_search, detail::max_safe_radius(*d.deformed));
  v.candidates.push_back(r);
  if (r < v.searched_to) {
    const auto steps = detail::patch_steps(*d.deformed, r, v.searched_to);
    v.candidates.insert(v.candidates.end(), steps.begin(), steps.end());
    // Offsets of length searched_to only enter beyond it; the limit itself is its own step.
    if (v.candidates.back() < v.searched_to) v.candidates.push_back(v.searched_to);
  }
  std::vector<detail::Centre> at_points, at_mid;
  const ExactScalar half = make_rational(1, 2);
  for (std::size_t i = d.first; i <= d.last(); ++i) {
    at_points.push_back({d.source->point(i), d.deformed->point(i - d.first), i});
    if (i < d.last())
      at_mid.push_back({half * (d.source->point(i) + d.source->point(i + 1)),
                        half * (d.deformed->point(i - d.first) + d.deformed->point(i + 1 - d.first)), i});
  }
  for (const auto& rp : v.candidates) {
    if (!v.anchors.r_prime && detail::invert_holds(d, at_points, r, rp, v.anchors)) v.anchors.r_prime = rp;
    if (!v.midpoints.r_prime && detail::invert_holds(d, at_mid, r, rp, v.midpoints)) v.midpoints.r_prime = rp;
    if (v.anchors.r_prime && v.midpoints.r_prime) break;
  }
  if (v.anchors.r_prime) v.anchors.witness.reset();
  if (v.midpoints.r_prime) v.midpoints.witness.reset();
  return v;
}

/// Smallest patch step of phi(P) at or above rho (r'-patches are constant between steps).
inline ExactScalar ceil_to_patch_step(const Deformation& d, const ExactScalar& rho, const ExactScalar& r_max) {
  for (const auto& s : detail::patch_steps(*d.deformed, ExactScalar(0), r_max))
    if (rho <= s) return s;
  throw WindowError("no patch step of the deformed pattern reaches " + rho.str());
}

struct DeriveProbe {
  ExactScalar radius;
  bool derivable = false;
  bool window_limited = false;
  std::optional<std::pair<ExactVector, ExactVector>> witness;
};

struct DeriveBackVerdict {
  std::optional<ExactScalar> radius;  // smallest passing R
  std::vector<DeriveProbe> probes;
};

/// Is P locally derivable from phi(P)? Tries each R in increasing order.
inline DeriveBackVerdict derive_back_check(const Deformation& d, std::vector<ExactScalar> radii) {
  std::sort(radii.begin(), radii.end());
  DeriveBackVerdict out;
  for (const auto& r : radii) {
    DeriveProbe probe;
    probe.radius = r;
    try {
      auto v = is_locally_derivable(*d.deformed, *d.source, r);
      probe.derivable = v.derivable;
      probe.witness = std::move(v.witness);
    } catch (const WindowError&) {
      probe.window_limited = true;
    }
    if (probe.derivable && !out.radius) out.radius = r;
    out.probes.push_back(std::move(probe));
  }
  return out;
}

/// Phi_phi(P - x) = phi(P) - phi(x), truncated to radius R.
inline Patch hull_map_phi(const Deformation& d, const ExactVector& x, const ExactScalar& r) {
  if (x.dim() != 1) throw PreconditionError("hull_map_phi is one-dimensional");
  const ExactScalar reach = r * d.lambda();
  const PatternSample& p = *d.source;
  if (x[0] - reach < p.x(d.first) || p.x(d.last()) < x[0] + reach)
    throw WindowError("ball of radius " + reach.str() + " around " + x.str() + " leaves the deformed range");
  return extract_patch(*d.deformed, ExactVector(d.phi(x[0])), r);
}

/// Invertible linear map of R^1 or R^2, row-major.
struct LinearMap {
  int dim = 1;
  std::array<ExactScalar, 4> a{ExactScalar(1), ExactScalar(0), ExactScalar(0), ExactScalar(1)};

  static LinearMap scalar(int dim, const ExactScalar& c) {
    LinearMap g;
    g.dim = dim;
    g.a = {c, ExactScalar(0), ExactScalar(0), c};
    return g;
  }
  static LinearMap identity(int dim) { return scalar(dim, ExactScalar(1)); }

  ExactScalar det() const { return dim == 1 ? a[0] : a[0] * a[3] - a[1] * a[2]; }
  ExactVector operator()(const ExactVector& v) const {
    if (v.dim() != dim) throw PreconditionError("linear map applied to a vector of the wrong dimension");
    if (dim == 1) return ExactVector(a[0] * v[0]);
    return ExactVector(a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]);
  }
};

/// Phi_g(P - x) = phi(P) - g(x) with phi = g + eta on the domain of eta.
/// Image points near the edge of the domain may be missing, so truncations
/// are only served where every image point is known: g(window of the
/// domain) shrunk by sup |eta| (1-norm per coordinate).
class HullMapG {
 public:
  HullMapG(PatternPtr p, LinearMap g, const SiteFunction<ExactVector>& eta) : source_(std::move(p)), g_(std::move(g)) {
    if (g_.dim != source_->dim()) throw PreconditionError("linear map and pattern differ in dimension");
    if (g_.det().is_zero()) throw PreconditionError("linear map must be invertible");
    if (eta.domain.empty()) throw PreconditionError("eta has an empty domain");
    std::vector<ExactVector> pts;
    ExactScalar bound;
    for (std::size_t t = 0; t < eta.size(); ++t) {
      const ExactVector& e = eta.values[t];
      if (e.dim() != g_.dim) throw PreconditionError("eta has the wrong dimension");
      pts.push_back(g_(source_->point(eta.domain[t])) + e);
      for (int c = 0; c < e.dim(); ++c) bound = max(bound, e[c].abs());
    }
    std::sort(pts.begin(), pts.end());
    for (std::size_t t = 1; t < pts.size(); ++t)
      if (pts[t] == pts[t - 1]) throw InadmissibleError("phi is not injective on the sample");
    // Domain box from the first and last domain points (1D) or their coordinate hull (2D).
    std::vector<ExactScalar> lo(g_.dim), hi(g_.dim), plo(g_.dim), phi(g_.dim);
    bool init = false;
    for (auto i : eta.domain) {
      const ExactVector gp = g_(source_->point(i));
      for (int c = 0; c < g_.dim; ++c) {
        if (!init) lo[c] = hi[c] = gp[c];
        lo[c] = min(lo[c], gp[c]);
        hi[c] = max(hi[c], gp[c]);
      }
      init = true;
    }
    plo = lo;
    phi = hi;
    for (const auto& q : pts)
      for (int c = 0; c < g_.dim; ++c) {
        plo[c] = min(plo[c], q[c]);
        phi[c] = max(phi[c], q[c]);
      }
    for (int c = 0; c < g_.dim; ++c) {
      lo[c] += bound;
      hi[c] -= bound;
    }
    auto vec = [&](const std::vector<ExactScalar>& v) { return g_.dim == 1 ? ExactVector(v[0]) : ExactVector(v[0], v[1]); };
    valid_ = Box{vec(lo), vec(hi)};
    image_ = std::make_shared<const PatternSample>(source_->field(), std::move(pts), Box{vec(plo), vec(phi)});
  }

  const PatternSample& image() const { return *image_; }
  const Box& valid() const { return valid_; }
  const LinearMap& g() const { return g_; }

  Patch operator()(const ExactVector& x, const ExactScalar& r) const {
    const ExactVector c = g_(x);
    for (int k = 0; k < g_.dim; ++k)
      if (c[k] - r < valid_.lo[k] || valid_.hi[k] < c[k] + r)
        throw WindowError("ball of radius " + r.str() + " around g(x) = " + c.str() + " leaves the valid image");
    return extract_patch(*image_, c, r);
  }

 private:
  PatternPtr source_;
  LinearMap g_;
  PatternPtr image_;
  Box valid_;
};

inline Patch hull_map_g(PatternPtr p, const LinearMap& g, const SiteFunction<ExactVector>& eta, const ExactVector& x,
                        const ExactScalar& r) {
  return HullMapG(std::move(p), g, eta)(x, r);
}

/// eta = phi - id on the deformed range, as a site function of the source.
inline SiteFunction<ExactVector> displacement(const Deformation& d) {
  SiteFunction<ExactVector> eta;
  eta.pattern = d.source;
  for (std::size_t i = d.first; i <= d.last(); ++i) {
    eta.domain.push_back(i);
    eta.values.push_back(d.deformed->point(i - d.first) - d.source->point(i));
  }
  return eta;
}

/// Outcome of the two-sided inclusion of S_{r'}(x) between balls of P - x.
struct InclusionReport {
  std::size_t anchors = 0;
  bool left = true;   // B_{(1-eps) r'}[P - x] within S_{r'}(x)
  bool right = true;  // S_{r'}(x) within B_{r' / (1-eps)}[P - x]
  std::optional<std::size_t> witness;  // first anchor violating either side
};

/// S_{r'}(x) = {h in P - x : phi(x + h) - phi(x) in B_{r'}}, checked for every
/// source point x whose balls stay inside the deformed range.
inline InclusionReport lemma10_inclusions(const Deformation& d, const ExactScalar& eps, const ExactScalar& rp) {
  if (!(eps.sign() >= 0 && eps < ExactScalar(1))) throw PreconditionError("epsilon must lie in [0, 1)");
  const ExactScalar inner = (ExactScalar(1) - eps) * rp;
  const ExactScalar outer = rp / (ExactScalar(1) - eps);
  const PatternSample& p = *d.source;
  const PatternSample& q = *d.deformed;
  InclusionReport out;
  for (std::size_t i = d.first; i <= d.last(); ++i) {
    const ExactScalar& x = p.x(i);
    if (x - outer < p.x(d.first) || p.x(d.last()) < x + outer) continue;
    const ExactScalar& fx = q.x(i - d.first);
    if (!q.ball_inside(ExactVector(fx), rp)) continue;
    ++out.anchors;
    bool ok = true;
    // Scan outward until both the source offset and the image offset are out of range.
    for (int dir : {-1, 1}) {
      for (std::size_t j = i;;) {
        if (dir < 0 ? j == d.first : j == d.last()) break;
        j = dir < 0 ? j - 1 : j + 1;
        const ExactScalar h = (p.x(j) - x).abs();
        const ExactScalar fh = (q.x(j - d.first) - fx).abs();
        const bool in_s = fh < rp;
        if (h < inner && !in_s) out.left = ok = false;
        if (in_s && !(h < outer)) out.right = ok = false;
        if (!(h < outer) && !in_s) break;
      }
    }
    if (!ok && !out.witness) out.witness = i;
  }
  return out;
}

/// Per edge class new length = old * (1 + u), u uniform in (-eps, eps),
/// rounded to a multiple of 10^-6 with |u| < eps.
inline Cochain random_cocycle(const ApGraph& g, double eps, std::mt19937_64& rng) {
  if (!(eps > 0 && eps < 1)) throw PreconditionError("random cocycle amplitude must lie in (0, 1)");
  std::uniform_real_distribution<double> dist(-eps, eps);
  Cochain f;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    long micro = std::lround(dist(rng) * 1e6);
    while (std::fabs(static_cast<double>(micro)) >= eps * 1e6) micro += micro > 0 ? -1 : 1;
    f.push_back(g.lengths[e] * (ExactScalar(1) + ExactScalar(make_rational(micro, 1000000))));
  }
  return f;
}

/// Decay profile of the shape change f - len.
inline std::vector<DecayRow> negligibility_profile(const Deformation& d, const std::vector<ExactScalar>& radii) {
  Cochain change;
  for (std::size_t e = 0; e < d.cocycle.size(); ++e) change.push_back(d.cocycle[e] - d.graph.lengths[e]);
  const auto psi = integrate_cocycle(change, d.graph, d.source, d.first);
  return decay_profile(psi, d.graph, radii);
}

}  // namespace apd

#endif  // APD_DEFORM_HPP
