#ifndef APD_EQUIVARIANCE_HPP
#define APD_EQUIVARIANCE_HPP

// Functions on pattern points and the patch-determined ("equivariant")
// properties they may have: strong equivariance with a range, the weak
// criterion by patch-class oscillation, local derivability of one point set
// from another, and smooth extension by mollification of the Voronoi field.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "apd/error.hpp"
#include "apd/exactnum.hpp"
#include "apd/parallel.hpp"
#include "apd/patterns.hpp"

namespace apd {

inline std::vector<double> components(double v) { return {v}; }
inline std::vector<double> components(const ExactScalar& v) { return {v.to_double()}; }
inline std::vector<double> components(const ExactVector& v) {
  const auto d = v.to_double();
  return v.dim() == 1 ? std::vector<double>{d[0]} : std::vector<double>{d[0], d[1]};
}

inline int value_dim(double) { return 1; }
inline int value_dim(const ExactScalar&) { return 1; }
inline int value_dim(const ExactVector& v) { return v.dim(); }

/// Max-norm distance between two values.
template <class V>
double value_distance(const V& a, const V& b) {
  const auto x = components(a), y = components(b);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::fabs(x[i] - y[i]));
  return d;
}

namespace detail {

inline bool values_agree(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
inline bool values_agree(const ExactScalar& a, const ExactScalar& b, double) { return a == b; }
inline bool values_agree(const ExactVector& a, const ExactVector& b, double) { return a == b; }

}  // namespace detail

/// A function P -> R^m given on a set of sample points (by index).
template <class V>
struct SiteFunction {
  PatternPtr pattern;
  std::vector<std::size_t> domain;  // increasing point indices
  std::vector<V> values;

  std::size_t size() const { return domain.size(); }
  int value_dim() const { return values.empty() ? 1 : apd::value_dim(values.front()); }

  const V* find(std::size_t point) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), point);
    if (it == domain.end() || *it != point) return nullptr;
    return &values[static_cast<std::size_t>(it - domain.begin())];
  }
  const V& at(std::size_t point) const {
    const V* v = find(point);
    if (!v) throw PreconditionError("point " + std::to_string(point) + " is outside the function's domain");
    return *v;
  }
};

/// f(i) evaluated at every sample point.
template <class Fn>
auto make_site_function(PatternPtr p, Fn fn) {
  using V = std::decay_t<decltype(fn(std::size_t{0}))>;
  SiteFunction<V> f;
  f.pattern = std::move(p);
  f.domain.reserve(f.pattern->size());
  f.values.reserve(f.pattern->size());
  for (std::size_t i = 0; i < f.pattern->size(); ++i) {
    f.domain.push_back(i);
    f.values.push_back(fn(i));
  }
  return f;
}

/// Delta_h f(x) = f(x + h) - f(x) on P ∩ (P - h), restricted to the domain of f.
template <class V>
SiteFunction<V> delta_h(const SiteFunction<V>& f, const ExactVector& h) {
  SiteFunction<V> out;
  out.pattern = f.pattern;
  for (std::size_t k = 0; k < f.domain.size(); ++k) {
    const auto j = f.pattern->find(f.pattern->point(f.domain[k]) + h);
    if (!j) continue;
    const V* target = f.find(*j);
    if (!target) continue;
    out.domain.push_back(f.domain[k]);
    out.values.push_back(*target - f.values[k]);
  }
  return out;
}

/// Outcome of testing one radius.
struct RangeProbe {
  ExactScalar radius;
  bool passed = false;
  std::size_t anchors = 0;
  std::size_t classes = 0;
  /// Two anchors (point indices) with equal patches but different values.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

struct EquivarianceResult {
  std::optional<ExactScalar> range;  // smallest passing tested radius
  std::vector<RangeProbe> probes;    // ascending radius
};

/// Tests, for each radius R, whether equal R-patches at safe anchors force
/// equal values. Exact values compare exactly; doubles within `tol`.
template <class V>
EquivarianceResult equivariance_range(const SiteFunction<V>& f, std::vector<ExactScalar> radii, double tol = 0.0) {
  std::sort(radii.begin(), radii.end());
  EquivarianceResult result;
  const PatternSample& p = *f.pattern;
  for (const auto& r : radii) {
    RangeProbe probe;
    probe.radius = r;
    std::vector<std::size_t> slots;  // positions in f.domain
    for (std::size_t k = 0; k < f.domain.size(); ++k)
      if (p.ball_inside(f.domain[k], r)) slots.push_back(k);
    if (slots.empty()) throw WindowError("no anchor of the function's domain is safe at radius " + r.str());
    std::vector<std::size_t> anchors;
    anchors.reserve(slots.size());
    for (auto k : slots) anchors.push_back(f.domain[k]);
    const auto keys = patch_keys(p, anchors, r);
    std::size_t count = 0;
    const auto group = group_keys(keys, &count);
    std::vector<std::size_t> first(count, slots.size());
    probe.passed = true;
    for (std::size_t a = 0; a < slots.size(); ++a) {
      std::size_t& rep = first[group[a]];
      if (rep == slots.size()) {
        rep = a;
        continue;
      }
      if (!detail::values_agree(f.values[slots[rep]], f.values[slots[a]], tol)) {
        probe.passed = false;
        if (!probe.witness) probe.witness = std::pair{anchors[rep], anchors[a]};
      }
    }
    probe.anchors = slots.size();
    probe.classes = count;
    if (probe.passed && !result.range) result.range = r;
    result.probes.push_back(std::move(probe));
  }
  return result;
}

/// Local derivability of Q from P with range R, checked on a finite set of
/// centres: the points of both sets plus midpoints of consecutive points (1D).
struct DerivabilityVerdict {
  bool derivable = true;
  ExactScalar radius;
  std::size_t centres = 0;
  std::optional<std::pair<ExactVector, ExactVector>> witness;
};

inline DerivabilityVerdict is_locally_derivable(const PatternSample& p, const PatternSample& q, const ExactScalar& r) {
  if (p.dim() != q.dim()) throw PreconditionError("patterns of different dimension");
  std::vector<ExactVector> all = p.points();
  all.insert(all.end(), q.points().begin(), q.points().end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<ExactVector> centres;
  const ExactScalar half = make_rational(1, 2);
  for (std::size_t i = 0; i < all.size(); ++i) {
    centres.push_back(all[i]);
    if (p.dim() == 1 && i + 1 < all.size()) centres.push_back(half * (all[i] + all[i + 1]));
  }
  std::vector<ExactVector> usable;
  for (auto& c : centres)
    if (p.ball_inside(c, r) && q.window().contains(c)) usable.push_back(std::move(c));
  if (usable.empty()) throw WindowError("no derivability test centre is safe at radius " + r.str());

  std::vector<PatchKey> keys(usable.size());
  std::vector<char> in_q(usable.size());
  parallel_for(usable.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      keys[k] = patch_key(p, usable[k], r);
      in_q[k] = q.find(usable[k]).has_value();
    }
  });
  DerivabilityVerdict v;
  v.radius = r;
  v.centres = usable.size();
  std::map<PatchKey, std::size_t> rep;
  for (std::size_t k = 0; k < usable.size(); ++k) {
    auto [it, fresh] = rep.emplace(keys[k], k);
    if (!fresh && in_q[it->second] != in_q[k]) {
      v.derivable = false;
      v.witness = std::pair{usable[it->second], usable[k]};
      break;
    }
  }
  return v;
}

/// Weak equivariance at tolerance epsilon: partition the safe anchors by
/// R-patch class and measure the oscillation of f within each cell. Every
/// cell is a union of R-patch classes, hence locally derivable from P.
struct WeakEquivarianceResult {
  bool passed = false;
  ExactScalar radius;
  double epsilon = 0.0;
  std::vector<std::size_t> anchors;      // point indices
  std::vector<std::size_t> cell;         // cell index per anchor
  std::vector<double> oscillation;       // per cell
  double max_oscillation = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // farthest pair in the worst cell
};

template <class V>
WeakEquivarianceResult weak_equivariance_test(const SiteFunction<V>& f, double epsilon, const ExactScalar& r) {
  const PatternSample& p = *f.pattern;
  WeakEquivarianceResult out;
  out.radius = r;
  out.epsilon = epsilon;
  std::vector<std::size_t> slots;
  for (std::size_t k = 0; k < f.domain.size(); ++k)
    if (p.ball_inside(f.domain[k], r)) slots.push_back(k);
  if (slots.empty()) throw WindowError("no anchor of the function's domain is safe at radius " + r.str());
  for (auto k : slots) out.anchors.push_back(f.domain[k]);
  std::size_t count = 0;
  out.cell = group_keys(patch_keys(p, out.anchors, r), &count);
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t a = 0; a < out.cell.size(); ++a) members[out.cell[a]].push_back(a);
  out.oscillation.assign(count, 0.0);
  for (std::size_t c = 0; c < count; ++c) {
    const auto& m = members[c];
    // Diameter in max-norm: per-component range.
    const int dim = f.value_dim();
    for (int comp = 0; comp < dim; ++comp) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      std::size_t alo = m.front(), ahi = m.front();
      for (auto a : m) {
        const double v = components(f.values[slots[a]])[static_cast<std::size_t>(comp)];
        if (v < lo) lo = v, alo = a;
        if (v > hi) hi = v, ahi = a;
      }
      if (hi - lo > out.oscillation[c]) {
        out.oscillation[c] = hi - lo;
        if (hi - lo >= out.max_oscillation) {
          out.max_oscillation = hi - lo;
          out.witness = std::pair{out.anchors[alo], out.anchors[ahi]};
        }
      }
    }
  }
  out.passed = out.max_oscillation < epsilon;
  return out;
}

/// Smooth bump C exp(-1 / (1 - (x/r)^2)) supported in (-r, r). `normalized`
/// scales to unit integral; `unit_peak` scales to rho(0) = 1.
class Bump {
 public:
  static Bump normalized(double radius) {
    Bump b(radius);
    b.scale_ = 1.0 / b.raw_integral();
    return b;
  }
  static Bump unit_peak(double radius) {
    Bump b(radius);
    b.scale_ = std::exp(1.0);
    return b;
  }

  double radius() const { return radius_; }
  double operator()(double x) const { return scale_ * shape(x); }
  /// Integral of rho over (-r, x).
  double cdf(double x) const {
    if (x <= -radius_) return 0.0;
    if (x >= radius_) return scale_ * raw_total_;
    return scale_ * integrate(-radius_, x);
  }
  double integral() const { return scale_ * raw_total_; }

 private:
  explicit Bump(double radius) : radius_(radius) {
    if (!(radius > 0)) throw PreconditionError("bump radius must be positive");
    raw_total_ = integrate(-radius_, radius_);
  }
  double shape(double x) const {
    const double s = x / radius_;
    if (s <= -1.0 || s >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
  }
  double integrate(double a, double b) const {
    auto fn = [this](double x) { return shape(x); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(fn, a, b, 8, 1e-13);
  }
  double raw_integral() const { return raw_total_; }

  double radius_;
  double raw_total_ = 0.0;
  double scale_ = 1.0;
};

/// rho * phi~ where phi~ equals psi(p) on the Voronoi cell of p. Because the
/// bump is narrower than half the minimal gap, at most one cell boundary m
/// meets the support and phi(x) = psi(cell(x)) + sum_m jump_m (H(x - m) - [m <= x]),
/// phi'(x) = sum_m jump_m rho(x - m), with H the bump's distribution function.
class MollifiedField {
 public:
  MollifiedField(const PatternSample& p, std::vector<std::size_t> domain, std::vector<double> psi, Bump bump)
      : bump_(std::move(bump)), first_(domain.empty() ? 0 : domain.front()), psi_(std::move(psi)) {
    p.require_dim1("mollify_extend");
    if (domain.size() < 2) throw PreconditionError("mollification needs at least two points");
    for (std::size_t k = 1; k < domain.size(); ++k)
      if (domain[k] != domain[k - 1] + 1) throw PreconditionError("mollification needs a contiguous domain");
    if (bump_.radius() > p.r_min().to_double() / 2.0 * (1.0 + 1e-12))
      throw PreconditionError("bump radius exceeds r_min / 2");
    for (auto i : domain) x_.push_back(p.approx(i));
    for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
      mid_.push_back(0.5 * (x_[k] + x_[k + 1]));
      jump_.push_back(psi_[k + 1] - psi_[k]);
    }
    lo_ = x_.front() + bump_.radius();
    hi_ = x_.back() - bump_.radius();
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const Bump& bump() const { return bump_; }
  std::size_t first_point() const { return first_; }

  double value(double x) const {
    check(x);
    const std::size_t cell = cell_of(x);
    double v = psi_[cell];
    for_near(x, [&](std::size_t m) { v += jump_[m] * (bump_.cdf(x - mid_[m]) - (mid_[m] <= x ? 1.0 : 0.0)); });
    return v;
  }
  double derivative(double x) const {
    check(x);
    double d = 0.0;
    for_near(x, [&](std::size_t m) { d += jump_[m] * bump_(x - mid_[m]); });
    return d;
  }
  /// Central finite difference with step h.
  double finite_difference(double x, double h) const { return (value(x + h) - value(x - h)) / (2.0 * h); }

 private:
  void check(double x) const {
    if (x < lo_ - 1e-12 || x > hi_ + 1e-12) throw WindowError("field evaluated outside its valid interval");
  }
  std::size_t cell_of(double x) const {
    return static_cast<std::size_t>(std::upper_bound(mid_.begin(), mid_.end(), x) - mid_.begin());
  }
  template <class Fn>
  void for_near(double x, Fn&& fn) const {
    const std::size_t c = cell_of(x);
    for (std::size_t m = (c >= 2 ? c - 2 : 0); m < std::min(mid_.size(), c + 2); ++m)
      if (std::fabs(x - mid_[m]) < bump_.radius()) fn(m);
  }

  Bump bump_;
  std::size_t first_;
  std::vector<double> psi_;
  std::vector<double> x_;
  std::vector<double> mid_;
  std::vector<double> jump_;
  double lo_ = 0.0, hi_ = 0.0;
};

/// Samples of a field on a uniform grid.
struct SampledField {
  double x0 = 0.0;
  double step = 0.0;
  std::vector<double> values;
  std::vector<double> derivative;  // central differences of `values`; one-sided at the ends

  double x(std::size_t j) const { return x0 + step * static_cast<double>(j); }
};

template <class V>
std::vector<double> scalar_values(const SiteFunction<V>& f) {
  std::vector<double> out;
  out.reserve(f.values.size());
  for (const auto& v : f.values) {
    const auto c = components(v);
    if (c.size() != 1) throw PreconditionError("mollification supports scalar-valued functions only");
    out.push_back(c.front());
  }
  return out;
}

/// Mollified Voronoi extension of psi with a unit-integral bump of the given radius.
template <class V>
MollifiedField mollify_extend(const SiteFunction<V>& psi, double bump_radius) {
  return MollifiedField(*psi.pattern, psi.domain, scalar_values(psi), Bump::normalized(bump_radius));
}

/// The grid covering the field's valid interval with `n` steps.
inline SampledField sample_field(const MollifiedField& field, std::size_t n) {
  if (n < 2) throw PreconditionError("a sampled field needs at least two steps");
  SampledField s;
  s.x0 = field.lo();
  s.step = (field.hi() - field.lo()) / static_cast<double>(n);
  s.values.resize(n + 1);
  parallel_for(n + 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) s.values[j] = field.value(std::min(field.hi(), s.x(j)));
  });
  s.derivative.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const std::size_t a = j == 0 ? 0 : j - 1, b = j == n ? n : j + 1;
    s.derivative[j] = (s.values[b] - s.values[a]) / (s.step * static_cast<double>(b - a));
  }
  return s;
}

/// phi(x) = sum_p rho(x - p) psi(p) with rho(0) = 1 (so phi = psi on P).
class SumExtension {
 public:
  template <class V>
  SumExtension(const SiteFunction<V>& psi, double bump_radius)
      : bump_(Bump::unit_peak(bump_radius)), psi_(scalar_values(psi)) {
    const PatternSample& p = *psi.pattern;
    p.require_dim1("sum extension");
    if (bump_radius > p.r_min().to_double() / 2.0 * (1.0 + 1e-12)) throw PreconditionError("bump radius exceeds r_min / 2");
    for (auto i : psi.domain) x_.push_back(p.approx(i));
  }
  double value(double x) const {
    auto it = std::lower_bound(x_.begin(), x_.end(), x - bump_.radius());
    double v = 0.0;
    for (; it != x_.end() && *it < x + bump_.radius(); ++it) v += bump_(x - *it) * psi_[static_cast<std::size_t>(it - x_.begin())];
    return v;
  }

 private:
  Bump bump_;
  std::vector<double> psi_;
  std::vector<double> x_;
};

/// Equivariance of a field on R (not just on P). Every centre x with a
/// nonempty R-patch is p + t for a point p whose Voronoi cell holds x, so the
/// test samples `per_cell` offsets t on a common grid in each cell, groups the
/// centres p + t by their exact R-patch, and compares field values within `tol`.
struct FieldRangeResult {
  std::optional<ExactScalar> range;
  std::vector<RangeProbe> probes;
  std::vector<double> max_deviation;  // per probe
};

template <class Fn>
FieldRangeResult field_equivariance_range(const PatternSample& p, std::size_t first, std::size_t last, Fn&& field,
                                          std::vector<ExactScalar> radii, std::size_t per_cell, double tol) {
  p.require_dim1("field_equivariance_range");
  std::sort(radii.begin(), radii.end());
  if (first < 1) first = 1;
  if (last + 1 > p.size()) last = p.size() - 1;
  // Common offset grid spanning the widest half-cell.
  ExactScalar widest;
  for (std::size_t i = first; i < last; ++i) widest = max(widest, p.x(i + 1) - p.x(i));
  const ExactScalar half_width = widest / 2;
  std::vector<ExactScalar> offsets;
  for (std::size_t s = 0; s < 2 * per_cell; ++s)
    offsets.push_back(half_width * ExactScalar(make_rational(2 * static_cast<long>(s) + 1, 2 * static_cast<long>(per_cell))) -
                      half_width);
  struct Centre {
    ExactVector x;
    std::size_t point;
  };
  std::vector<Centre> centres;
  const ExactScalar half = make_rational(1, 2);
  for (std::size_t i = first; i < last; ++i) {
    const ExactScalar lo = half * (p.x(i - 1) - p.x(i)), hi = half * (p.x(i + 1) - p.x(i));
    for (const auto& t : offsets)
      if (lo < t && t < hi) centres.push_back({ExactVector(p.x(i) + t), i});
  }
  std::vector<double> values(centres.size());
  for (std::size_t k = 0; k < centres.size(); ++k) values[k] = field(centres[k].x[0].to_double());

  FieldRangeResult result;
  for (const auto& r : radii) {
    RangeProbe probe;
    probe.radius = r;
    std::vector<std::size_t> use;
    for (std::size_t k = 0; k < centres.size(); ++k)
      if (p.ball_inside(centres[k].x, r)) use.push_back(k);
    if (use.empty()) throw WindowError("no field sample is safe at radius " + r.str());
    std::vector<PatchKey> keys(use.size());
    parallel_for(use.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) keys[k] = patch_key(p, centres[use[k]].x, r);
    });
    std::size_t count = 0;
    const auto group = group_keys(keys, &count);
    std::vector<std::size_t> rep(count, use.size());
    double worst = 0.0;
    probe.passed = true;
    for (std::size_t k = 0; k < use.size(); ++k) {
      std::size_t& g = rep[group[k]];
      if (g == use.size()) {
        g = k;
        continue;
      }
      const double dev = std::fabs(values[use[k]] - values[use[g]]);
      worst = std::max(worst, dev);
      if (dev > tol) {
        probe.passed = false;
        if (!probe.witness) probe.witness = std::pair{centres[use[g]].point, centres[use[k]].point};
      }
    }
    probe.anchors = use.size();
    probe.classes = count;
    if (probe.passed && !result.range) result.range = r;
    result.probes.push_back(std::move(probe));
    result.max_deviation.push_back(worst);
  }
  return result;
}

}  // namespace apd

#endif  // APD_EQUIVARIANCE_HPP
