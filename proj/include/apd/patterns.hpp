#ifndef APD_PATTERNS_HPP
#define APD_PATTERNS_HPP

// Finite windows of Delone sets with finite local complexity.
//
// A PatternSample is every point of some (infinite) pattern P that lies in a
// closed axis-aligned box. An r-patch B_r[P - x] uses the open ball, so it is
// fully known exactly when B(x, r) fits in the box. Quantities that could
// change if the box grew carry a `censored` flag.
//
// Radius convention: radius 0 stands for the limit r -> 0+, i.e. the patch
// {0} ∩ (P - x). For r > 0 this agrees with the open-ball definition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "apd/error.hpp"
#include "apd/exactnum.hpp"
#include "apd/parallel.hpp"

namespace apd {

/// Closed axis-aligned box.
struct Box {
  ExactVector lo;
  ExactVector hi;

  int dim() const { return lo.dim(); }
  bool contains(const ExactVector& x) const {
    for (int c = 0; c < dim(); ++c) {
      if (x[c] < lo[c] || hi[c] < x[c]) return false;
    }
    return true;
  }
  /// Largest r with B(x, r) inside the box (negative when x is outside).
  ExactScalar margin(const ExactVector& x) const {
    ExactScalar m = x[0] - lo[0];
    for (int c = 0; c < dim(); ++c) {
      m = min(m, x[c] - lo[c]);
      m = min(m, hi[c] - x[c]);
    }
    return m;
  }
};

namespace detail {

inline double tolerance(double a, double b) { return 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

}  // namespace detail

class PatternSample {
 public:
  /// Points are sorted lexicographically; `tiles` (dim 1 only) labels the
  /// tile between consecutive points and must have size() - 1 letters.
  PatternSample(long field, std::vector<ExactVector> points, Box window, std::string tiles = {})
      : field_(field), points_(std::move(points)), window_(std::move(window)), tiles_(std::move(tiles)) {
    dim_ = window_.dim();
    if (dim_ != 1 && dim_ != 2) throw PreconditionError("pattern dimension must be 1 or 2");
    for (const auto& p : points_) {
      if (p.dim() != dim_) throw PreconditionError("point dimension does not match window");
      if (!window_.contains(p)) throw PreconditionError("point " + p.str() + " lies outside the window");
    }
    if (!tiles_.empty() && dim_ != 1) throw PreconditionError("tile labels are only supported in dimension 1");
    if (!tiles_.empty() && tiles_.size() + 1 != points_.size())
      throw PreconditionError("tile labels must number one less than the points");
    if (tiles_.empty()) {
      std::sort(points_.begin(), points_.end());
    } else if (!std::is_sorted(points_.begin(), points_.end())) {
      throw PreconditionError("labelled points must be given in increasing order");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (points_[i] == points_[i - 1]) throw PreconditionError("duplicate point " + points_[i].str());
    }
    approx_.reserve(points_.size());
    for (const auto& p : points_) approx_.push_back(p.to_double());
    if (dim_ == 1) index_gaps();
  }

  int dim() const { return dim_; }
  long field() const { return field_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const ExactVector& point(std::size_t i) const { return points_[i]; }
  const std::vector<ExactVector>& points() const { return points_; }
  /// Coordinate of point i (dimension 1).
  const ExactScalar& x(std::size_t i) const { return points_[i][0]; }
  double approx(std::size_t i, int c = 0) const { return approx_[i][static_cast<std::size_t>(c)]; }
  const Box& window() const { return window_; }
  const std::string& tiles() const { return tiles_; }
  bool has_tiles() const { return !tiles_.empty(); }

  /// Interned gap between points i and i+1 (dimension 1); ids follow gap order.
  int gap_id(std::size_t i) const { return gap_ids_[i]; }
  const ExactScalar& gap(std::size_t i) const { return gap_values_[static_cast<std::size_t>(gap_ids_[i])]; }
  const std::vector<ExactScalar>& gap_values() const { return gap_values_; }

  /// Index of an exact point, if present.
  std::optional<std::size_t> find(const ExactVector& p) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it != points_.end() && *it == p) return static_cast<std::size_t>(it - points_.begin());
    return std::nullopt;
  }

  bool ball_inside(const ExactVector& x, const ExactScalar& r) const { return r <= window_.margin(x); }
  bool ball_inside(std::size_t i, const ExactScalar& r) const {
    const double m = approx_margin(i);
    const double dr = r.to_double();
    const double tol = detail::tolerance(m, dr);
    if (dr < m - tol) return true;
    if (dr > m + tol) return false;
    return ball_inside(points_[i], r);
  }

  /// Indices of points p with |p - x| < r.
  std::vector<std::size_t> ball_members(const ExactVector& x, const ExactScalar& r) const {
    std::vector<std::size_t> out;
    if (r.sign() <= 0) return out;
    const auto dx = x.to_double();
    const double dr = r.to_double();
    auto [first, last] = first_coordinate_range(x[0], dx[0], r, dr);
    if (dim_ == 1) {
      for (std::size_t i = first; i < last; ++i) out.push_back(i);
      return out;
    }
    const ExactScalar r2 = r * r;
    const double dr2 = dr * dr;
    for (std::size_t i = first; i < last; ++i) {
      const double ex = approx_[i][0] - dx[0];
      const double ey = approx_[i][1] - dx[1];
      const double n2 = ex * ex + ey * ey;
      const double tol = detail::tolerance(n2, dr2);
      if (n2 > dr2 + tol) continue;
      if (n2 < dr2 - tol || (points_[i] - x).norm_sq() < r2) out.push_back(i);
    }
    return out;
  }

  /// Exact minimal distance squared between distinct points.
  ExactScalar r_min_sq() const {
    if (points_.size() < 2) throw PreconditionError("r_min needs at least two points");
    if (dim_ == 1) {
      ExactScalar m = gap_values_.front();
      return m * m;
    }
    std::optional<ExactScalar> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (std::size_t j = i + 1; j < points_.size(); ++j) {
        const double ex = approx_[j][0] - approx_[i][0];
        if (ex * ex > best_d * (1 + 1e-9) + 1e-12) break;
        const double ey = approx_[j][1] - approx_[i][1];
        if (ex * ex + ey * ey > best_d * (1 + 1e-9) + 1e-12) continue;
        ExactScalar n2 = (points_[j] - points_[i]).norm_sq();
        if (!best || n2 < *best) {
          best = n2;
          best_d = n2.to_double();
        }
      }
    }
    return *best;
  }

  /// Exact minimal gap (dimension 1).
  ExactScalar r_min() const {
    require_dim1("r_min");
    if (gap_values_.empty()) throw PreconditionError("r_min needs at least two points");
    return gap_values_.front();
  }

  void require_dim1(const char* what) const {
    if (dim_ != 1) throw PreconditionError(std::string(what) + " is only implemented in dimension 1");
  }

 private:
  double approx_margin(std::size_t i) const {
    double m = std::numeric_limits<double>::infinity();
    for (int c = 0; c < dim_; ++c) {
      m = std::min(m, approx_[i][static_cast<std::size_t>(c)] - window_.lo[c].to_double());
      m = std::min(m, window_.hi[c].to_double() - approx_[i][static_cast<std::size_t>(c)]);
    }
    return m;
  }

  // [first, last): points whose first coordinate c satisfies |c - x0| < r.
  std::pair<std::size_t, std::size_t> first_coordinate_range(const ExactScalar& x0, double dx0, const ExactScalar& r,
                                                             double dr) const {
    auto below = [&](std::size_t i, const ExactScalar& bound, double dbound) {
      // p_i - x0 <= bound ?
      const double v = approx_[i][0] - dx0;
      const double tol = detail::tolerance(v, dbound);
      if (v < dbound - tol) return true;
      if (v > dbound + tol) return false;
      return points_[i][0] - x0 <= bound;
    };
    auto strictly_below = [&](std::size_t i, const ExactScalar& bound, double dbound) {
      const double v = approx_[i][0] - dx0;
      const double tol = detail::tolerance(v, dbound);
      if (v < dbound - tol) return true;
      if (v > dbound + tol) return false;
      return points_[i][0] - x0 < bound;
    };
    const ExactScalar neg = -r;
    std::size_t lo = 0, hi = points_.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (below(mid, neg, -dr)) lo = mid + 1; else hi = mid;
    }
    const std::size_t first = lo;
    hi = points_.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (strictly_below(mid, r, dr)) lo = mid + 1; else hi = mid;
    }
    return {first, lo};
  }

  void index_gaps() {
    if (points_.size() < 2) return;
    std::vector<ExactScalar> gaps;
    gaps.reserve(points_.size() - 1);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) gaps.push_back(points_[i + 1][0] - points_[i][0]);
    std::map<ExactScalar, int, StructuralLess> ids;
    for (const auto& g : gaps) ids.emplace(g, 0);
    std::vector<ExactScalar> distinct;
    for (const auto& [g, _] : ids) distinct.push_back(g);
    std::sort(distinct.begin(), distinct.end());
    for (std::size_t k = 0; k < distinct.size(); ++k) ids[distinct[k]] = static_cast<int>(k);
    gap_ids_.reserve(gaps.size());
    for (const auto& g : gaps) gap_ids_.push_back(ids.at(g));
    gap_values_ = std::move(distinct);
  }

  long field_ = 0;
  int dim_ = 1;
  std::vector<ExactVector> points_;
  std::vector<std::array<double, 2>> approx_;
  Box window_;
  std::string tiles_;
  std::vector<int> gap_ids_;
  std::vector<ExactScalar> gap_values_;
};

using PatternPtr = std::shared_ptr<const PatternSample>;

/// P - v, with the window moved along.
inline PatternSample translate(const PatternSample& p, const ExactVector& v) {
  std::vector<ExactVector> pts;
  pts.reserve(p.size());
  for (const auto& q : p.points()) pts.push_back(q - v);
  return PatternSample(p.field(), std::move(pts), Box{p.window().lo - v, p.window().hi - v}, p.tiles());
}

/// The set B_r[P - x].
struct Patch {
  ExactScalar radius;
  std::vector<ExactVector> offsets;  // sorted by value

  bool contains_origin() const {
    return std::any_of(offsets.begin(), offsets.end(), [](const ExactVector& v) { return v.is_zero(); });
  }
  friend bool operator==(const Patch& a, const Patch& b) { return a.offsets == b.offsets; }
};

/// Exact offsets of B_r[P - x]. Throws WindowError unless B(x, r) lies in the window.
inline Patch extract_patch(const PatternSample& p, const ExactVector& x, const ExactScalar& r) {
  if (!p.ball_inside(x, r)) throw WindowError("ball of radius " + r.str() + " around " + x.str() + " leaves the window");
  Patch patch{r, {}};
  if (r.is_zero()) {
    if (p.find(x)) patch.offsets.push_back(ExactVector::zero(p.dim()));
    return patch;
  }
  for (std::size_t i : p.ball_members(x, r)) patch.offsets.push_back(p.point(i) - x);
  std::sort(patch.offsets.begin(), patch.offsets.end());
  return patch;
}

/// Cheap exact identity of a patch. In dimension 1 a patch is described by
/// the offsets of the nearest points on each side and the interned gaps
/// beyond them; in dimension 2 by its sorted offsets.
struct PatchKey {
  bool at_point = false;
  std::optional<ExactScalar> right_offset;
  std::optional<ExactScalar> left_offset;
  std::vector<int> right;
  std::vector<int> left;
  std::vector<ExactVector> offsets;

  friend bool operator<(const PatchKey& a, const PatchKey& b) {
    if (a.at_point != b.at_point) return a.at_point < b.at_point;
    if (a.right != b.right) return a.right < b.right;
    if (a.left != b.left) return a.left < b.left;
    if (int c = compare_opt(a.right_offset, b.right_offset); c != 0) return c < 0;
    if (int c = compare_opt(a.left_offset, b.left_offset); c != 0) return c < 0;
    return StructuralLess{}(a.offsets, b.offsets);
  }
  friend bool operator==(const PatchKey& a, const PatchKey& b) { return !(a < b) && !(b < a); }

 private:
  static int compare_opt(const std::optional<ExactScalar>& x, const std::optional<ExactScalar>& y) {
    if (x.has_value() != y.has_value()) return x.has_value() ? 1 : -1;
    if (!x) return 0;
    return structural_compare(*x, *y);
  }
};

namespace detail {

inline PatchKey key_from_range(const PatternSample& p, std::size_t first, std::size_t last, std::size_t split,
                               const ExactScalar& x, bool at_point) {
  // Points [first, split) lie left of x, [split, last) at or right of x.
  PatchKey key;
  key.at_point = at_point;
  if (split < last) {
    if (!at_point) key.right_offset = p.x(split) - x;
    for (std::size_t i = split; i + 1 < last; ++i) key.right.push_back(p.gap_id(i));
  }
  if (first < split) {
    if (!at_point) key.left_offset = x - p.x(split - 1);
    else key.left.push_back(p.gap_id(split - 1));
    for (std::size_t i = split - 1; i > first; --i) key.left.push_back(p.gap_id(i - 1));
  }
  return key;
}

}  // namespace detail

/// Key of B_r[P - x] at an arbitrary centre x. The caller guarantees the window.
inline PatchKey patch_key(const PatternSample& p, const ExactVector& x, const ExactScalar& r) {
  if (r.is_zero()) {
    PatchKey key;
    key.at_point = p.find(x).has_value();
    return key;
  }
  const auto members = p.ball_members(x, r);
  if (p.dim() == 2) {
    PatchKey key;
    for (std::size_t i : members) key.offsets.push_back(p.point(i) - x);
    std::sort(key.offsets.begin(), key.offsets.end(), StructuralLess{});
    key.at_point = std::any_of(key.offsets.begin(), key.offsets.end(), [](const ExactVector& v) { return v.is_zero(); });
    return key;
  }
  if (members.empty()) return PatchKey{};
  const std::size_t first = members.front();
  const std::size_t last = members.back() + 1;
  std::size_t split = first;
  while (split < last && p.x(split) < x[0]) ++split;
  const bool at_point = split < last && p.x(split) == x[0];
  return detail::key_from_range(p, first, last, split, x[0], at_point);
}

/// Key of B_r[P - p_i] for a sample point.
inline PatchKey patch_key_at(const PatternSample& p, std::size_t i, const ExactScalar& r) {
  if (r.is_zero()) {
    PatchKey key;
    key.at_point = true;
    return key;
  }
  if (p.dim() == 2) return patch_key(p, p.point(i), r);
  const auto members = p.ball_members(p.point(i), r);
  return detail::key_from_range(p, members.front(), members.back() + 1, i, p.x(i), true);
}

/// Points p with B(p, r) inside the window. May be empty; callers decide.
inline std::vector<std::size_t> safe_anchors(const PatternSample& p, const ExactScalar& r) {
  if (r.sign() < 0) throw PreconditionError("radius must be non-negative");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.ball_inside(i, r)) out.push_back(i);
  }
  return out;
}

/// Translation-congruence classes of r-patches at the safe anchors.
struct PatchClassTable {
  ExactScalar radius;
  std::vector<Patch> classes;          // sorted by offsets, no duplicates
  std::vector<std::size_t> anchors;    // point indices
  std::vector<std::size_t> membership; // class index per anchor

  std::size_t class_of_point(std::size_t point_index) const {
    auto it = std::lower_bound(anchors.begin(), anchors.end(), point_index);
    if (it == anchors.end() || *it != point_index) throw PreconditionError("point is not a safe anchor");
    return membership[static_cast<std::size_t>(it - anchors.begin())];
  }
};

/// Computes patch keys for the given anchors in parallel.
inline std::vector<PatchKey> patch_keys(const PatternSample& p, const std::vector<std::size_t>& anchors,
                                        const ExactScalar& r) {
  std::vector<PatchKey> keys(anchors.size());
  parallel_for(anchors.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) keys[k] = patch_key_at(p, anchors[k], r);
  });
  return keys;
}

/// Groups keys; returns the group index per key in first-seen order.
inline std::vector<std::size_t> group_keys(const std::vector<PatchKey>& keys, std::size_t* count = nullptr) {
  std::map<PatchKey, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(ids.emplace(k, ids.size()).first->second);
  if (count) *count = ids.size();
  return out;
}

inline PatchClassTable classify_patches(const PatternSample& p, const ExactScalar& r) {
  PatchClassTable table;
  table.radius = r;
  table.anchors = safe_anchors(p, r);
  if (table.anchors.empty()) throw WindowError("no safe anchors at radius " + r.str());
  const auto keys = patch_keys(p, table.anchors, r);
  std::size_t count = 0;
  const auto group = group_keys(keys, &count);
  std::vector<std::size_t> first_member(count, table.anchors.size());
  for (std::size_t k = 0; k < group.size(); ++k) {
    if (first_member[group[k]] == table.anchors.size()) first_member[group[k]] = k;
  }
  std::vector<Patch> reps;
  reps.reserve(count);
  for (std::size_t g = 0; g < count; ++g) reps.push_back(extract_patch(p, p.point(table.anchors[first_member[g]]), r));
  std::vector<std::size_t> order(count);
  for (std::size_t g = 0; g < count; ++g) order[g] = g;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(reps[a].offsets.begin(), reps[a].offsets.end(), reps[b].offsets.begin(),
                                        reps[b].offsets.end());
  });
  std::vector<std::size_t> rank(count);
  for (std::size_t pos = 0; pos < count; ++pos) {
    rank[order[pos]] = pos;
    table.classes.push_back(reps[order[pos]]);
  }
  table.membership.reserve(group.size());
  for (auto g : group) table.membership.push_back(rank[g]);
  return table;
}

/// Outcome of a truncated patch metric.
struct MetricResult {
  enum class Status { Exact, BelowResolution, Unbounded };
  Status status = Status::BelowResolution;
  /// Squared supremum radius of agreement (Exact), or the tested radius squared.
  ExactScalar radius_sq;
  /// The metric value; for BelowResolution an upper bound; +inf for Unbounded.
  double value = 0.0;
  /// 1 / radius, exact in dimension 1.
  std::optional<ExactScalar> exact_value;
};

namespace detail {

// Smallest |v|^2 over the symmetric difference of (P - x) and (Q - y) restricted to B(0, t).
inline std::optional<ExactVector> first_difference(const PatternSample& p, const ExactVector& x, const PatternSample& q,
                                                   const ExactVector& y, const ExactScalar& t) {
  std::vector<ExactVector> a, b;
  for (std::size_t i : p.ball_members(x, t)) a.push_back(p.point(i) - x);
  for (std::size_t i : q.ball_members(y, t)) b.push_back(q.point(i) - y);
  std::sort(a.begin(), a.end(), StructuralLess{});
  std::sort(b.begin(), b.end(), StructuralLess{});
  std::vector<ExactVector> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff), StructuralLess{});
  std::optional<ExactVector> best;
  std::optional<ExactScalar> best_n;
  for (auto& v : diff) {
    ExactScalar n = v.norm_sq();
    if (!best_n || n < *best_n) {
      best_n = n;
      best = v;
    }
  }
  return best;
}

inline void require_ball(const PatternSample& p, const ExactScalar& r) {
  if (!p.ball_inside(ExactVector::zero(p.dim()), r))
    throw WindowError("window does not contain B(0, " + r.str() + ")");
}

}  // namespace detail

/// inf { 1/r : r <= r_max, B_r[P] = B_r[Q] }.
inline MetricResult metric_d0(const PatternSample& p, const PatternSample& q, const ExactScalar& r_max) {
  if (p.dim() != q.dim()) throw PreconditionError("patterns of different dimension");
  detail::require_ball(p, r_max);
  detail::require_ball(q, r_max);
  const ExactVector origin = ExactVector::zero(p.dim());
  MetricResult out;
  auto diff = detail::first_difference(p, origin, q, origin, r_max);
  if (!diff) {
    out.status = MetricResult::Status::BelowResolution;
    out.radius_sq = r_max * r_max;
    out.value = 1.0 / r_max.to_double();
    return out;
  }
  out.radius_sq = diff->norm_sq();
  if (out.radius_sq.is_zero()) {
    out.status = MetricResult::Status::Unbounded;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.status = MetricResult::Status::Exact;
  if (p.dim() == 1) {
    out.exact_value = (*diff)[0].abs().inverse();
    out.value = out.exact_value->to_double();
  } else {
    out.value = 1.0 / std::sqrt(out.radius_sq.to_double());
  }
  return out;
}

/// Like metric_d0 but allowing translations x, x' in B(0, 1/(2r)). Candidate
/// translations are 0 and those built from point differences: (p, q) and the
/// symmetric split ((p - q)/2, (q - p)/2).
inline MetricResult metric_dt(const PatternSample& p, const PatternSample& q, const ExactScalar& r_max) {
  const MetricResult base = metric_d0(p, q, r_max);
  const double rmax = r_max.to_double();
  double best_r = base.status == MetricResult::Status::Unbounded ? 0.0 : std::sqrt(base.radius_sq.to_double());
  bool censored = base.status == MetricResult::Status::BelowResolution;
  // A candidate with norm m can only support r < 1/(2m); it helps only if that beats best_r.
  const double reach = best_r > 0 ? 1.0 / (2.0 * best_r) : rmax;
  const ExactScalar collect = rational_from_double(std::min(2.0 * reach, rmax));
  const ExactVector origin = ExactVector::zero(p.dim());
  std::vector<std::pair<ExactVector, ExactVector>> candidates;
  const auto pm = p.ball_members(origin, collect);
  const auto qm = q.ball_members(origin, collect);
  const ExactScalar half = make_rational(1, 2);
  for (std::size_t i : pm) {
    for (std::size_t j : qm) {
      candidates.emplace_back(p.point(i), q.point(j));
      const ExactVector s = half * (p.point(i) - q.point(j));
      candidates.emplace_back(s, -s);
    }
  }
  for (const auto& [x, y] : candidates) {
    const auto ax = x.to_double();
    const auto ay = y.to_double();
    const double m = std::max(std::hypot(ax[0], ax[1]), std::hypot(ay[0], ay[1]));
    const double limit = m > 0 ? 1.0 / (2.0 * m) : std::numeric_limits<double>::infinity();
    if (limit <= best_r) continue;
    const double room = rmax - m;
    if (room <= best_r) continue;
    const ExactScalar t = rational_from_double(room);
    auto diff = detail::first_difference(p, x, q, y, t);
    double agree = room;
    bool cens = true;
    if (diff) {
      agree = std::sqrt(diff->norm_sq().to_double());
      cens = false;
    }
    const double r = std::min(agree, limit);
    if (r > best_r) {
      best_r = r;
      censored = cens && agree <= limit;
    }
  }
  MetricResult out;
  if (best_r <= 0) {
    out.status = MetricResult::Status::Unbounded;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.status = censored ? MetricResult::Status::BelowResolution : MetricResult::Status::Exact;
  out.radius_sq = rational_from_double(best_r * best_r);
  out.value = 1.0 / best_r;
  return out;
}

/// Exact union of all r-patch offsets over the safe anchors, sorted by value.
inline std::vector<ExactVector> patch_offset_union(const PatternSample& p, const ExactScalar& r) {
  const auto anchors = safe_anchors(p, r);
  if (anchors.empty()) throw WindowError("no safe anchors at radius " + r.str());
  std::set<ExactVector, StructuralLess> uni;
  if (p.dim() == 1) {
    // Offsets depend only on the gap word around the anchor.
    std::set<PatchKey> seen;
    for (std::size_t i : anchors) {
      PatchKey key = patch_key_at(p, i, r);
      if (!seen.insert(key).second) continue;
      for (std::size_t j : p.ball_members(p.point(i), r)) uni.insert(p.point(j) - p.point(i));
    }
  } else {
    for (std::size_t i : anchors) {
      for (std::size_t j : p.ball_members(p.point(i), r)) uni.insert(p.point(j) - p.point(i));
    }
  }
  std::vector<ExactVector> out(uni.begin(), uni.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// Squared A_P(r): minimal squared distance between distinct offsets in the union of r-patches.
inline ExactScalar compute_a_sq(const PatternSample& p, const ExactScalar& r) {
  const auto offsets = patch_offset_union(p, r);
  if (offsets.size() < 2) throw PreconditionError("A_P needs at least two distinct offsets");
  std::optional<ExactScalar> best;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (std::size_t j = i + 1; j < offsets.size(); ++j) {
      ExactScalar n = (offsets[j] - offsets[i]).norm_sq();
      if (!best || n < *best) best = n;
      if (p.dim() == 1) break;  // sorted: only neighbours matter
    }
  }
  return *best;
}

/// A_P(r) in dimension 1 (exact).
inline ExactScalar compute_a(const PatternSample& p, const ExactScalar& r) {
  p.require_dim1("compute_a");
  const auto offsets = patch_offset_union(p, r);
  if (offsets.size() < 2) throw PreconditionError("A_P needs at least two distinct offsets");
  ExactScalar best = offsets[1][0] - offsets[0][0];
  for (std::size_t i = 2; i < offsets.size(); ++i) best = min(best, offsets[i][0] - offsets[i - 1][0]);
  return best;
}

/// Agreement between the patches at two anchors: the supremum radius at which
/// they coincide. When `censored`, the patches agree on the whole known range
/// and `size_sq` is only a lower bound.
struct Recurrence {
  std::size_t first = 0;
  std::size_t second = 0;
  ExactScalar size_sq;
  bool censored = false;
  /// Offset (relative to its anchor) of a point that lies in exactly one of
  /// the two patches at distance sqrt(size_sq): certifies maximality.
  std::optional<ExactVector> witness;

  double size() const { return std::sqrt(size_sq.to_double()); }
};

namespace detail {

struct SideAgreement {
  ExactScalar value;  // exact distance or known bound
  bool exact = false;
  std::optional<ExactScalar> witness;
};

// Walks outward (direction +1 or -1) from anchors i, j starting after `common`
// shared gaps. `ext_i`, `ext_j` are the known extents on that side.
inline SideAgreement side_agreement(const PatternSample& p, std::size_t i, std::size_t j, std::size_t common, int dir) {
  const std::size_t n = p.size();
  auto has = [&](std::size_t a, std::size_t t) { return dir > 0 ? a + t + 1 < n : a >= t + 1; };
  auto offset = [&](std::size_t a, std::size_t t) {
    return dir > 0 ? p.x(a + t + 1) - p.x(a) : p.x(a) - p.x(a - t - 1);
  };
  auto gid = [&](std::size_t a, std::size_t t) { return dir > 0 ? p.gap_id(a + t) : p.gap_id(a - t - 1); };
  auto extent = [&](std::size_t a) { return dir > 0 ? p.window().hi[0] - p.x(a) : p.x(a) - p.window().lo[0]; };
  std::size_t t = common;
  while (has(i, t) && has(j, t) && gid(i, t) == gid(j, t)) ++t;
  SideAgreement out;
  const bool hi_ = has(i, t), hj = has(j, t);
  if (hi_ && hj) {
    ExactScalar oi = offset(i, t), oj = offset(j, t);
    out.exact = true;
    out.value = min(oi, oj);
    out.witness = dir > 0 ? out.value : -out.value;
    return out;
  }
  const ExactScalar ei = extent(i), ej = extent(j);
  if (hi_ || hj) {
    ExactScalar o = hi_ ? offset(i, t) : offset(j, t);
    const ExactScalar& other_extent = hi_ ? ej : ei;
    if (o < other_extent) {
      out.exact = true;
      out.value = o;
      out.witness = dir > 0 ? o : -o;
      return out;
    }
  }
  out.value = min(ei, ej);
  return out;
}

inline Recurrence combine_sides(std::size_t i, std::size_t j, SideAgreement left, SideAgreement right) {
  Recurrence rec;
  rec.first = i;
  rec.second = j;
  const SideAgreement* pick = nullptr;
  if (left.exact && (!right.exact || left.value <= right.value) && left.value <= right.value) pick = &left;
  else if (right.exact && right.value <= left.value) pick = &right;
  else if (left.exact && left.value <= right.value) pick = &left;
  if (pick) {
    rec.size_sq = pick->value * pick->value;
    rec.witness = ExactVector(*pick->witness);
  } else {
    const ExactScalar bound = min(left.value, right.value);
    rec.size_sq = bound * bound;
    rec.censored = true;
  }
  return rec;
}

}  // namespace detail

/// Agreement radius of the patches at sample points i and j.
inline Recurrence agreement(const PatternSample& p, std::size_t i, std::size_t j) {
  if (p.dim() == 1) {
    return detail::combine_sides(i, j, detail::side_agreement(p, i, j, 0, -1), detail::side_agreement(p, i, j, 0, +1));
  }
  // Dimension 2: symmetric difference of offsets inside the common known ball.
  Recurrence rec;
  rec.first = i;
  rec.second = j;
  const ExactScalar cap = min(p.window().margin(p.point(i)), p.window().margin(p.point(j)));
  auto diff = detail::first_difference(p, p.point(i), p, p.point(j), cap);
  if (diff) {
    rec.size_sq = diff->norm_sq();
    rec.witness = *diff;
  } else {
    rec.size_sq = cap * cap;
    rec.censored = true;
  }
  return rec;
}

/// Streams every unordered pair i < j of anchors (safe at r_lo) whose agreement
/// radius may be >= r_lo, with its Recurrence. Dimension 1 uses longest-common-
/// extension tables per diagonal, so the cost is O(N^2) plus the output.
template <class Visitor>
void for_each_agreement(const PatternSample& p, const ExactScalar& r_lo, Visitor&& visit) {
  const auto anchors = safe_anchors(p, r_lo);
  if (p.dim() != 1) {
    for (std::size_t a = 0; a < anchors.size(); ++a)
      for (std::size_t b = a + 1; b < anchors.size(); ++b) {
        Recurrence rec = agreement(p, anchors[a], anchors[b]);
        if (rec.censored || r_lo * r_lo <= rec.size_sq) visit(rec);
      }
    return;
  }
  const std::size_t n = p.size();
  if (n < 2) return;
  std::vector<char> is_anchor(n, 0);
  for (auto a : anchors) is_anchor[a] = 1;
  const double dlo = r_lo.to_double();
  const ExactScalar lo_sq = r_lo * r_lo;
  std::vector<std::size_t> right(n), left(n);
  for (std::size_t delta = 1; delta < n; ++delta) {
    // right[i]: number of equal gaps starting at i and i + delta.
    for (std::size_t k = n - delta; k-- > 0;) {
      const std::size_t i = k;
      const bool ok = i + delta + 1 < n && p.gap_id(i) == p.gap_id(i + delta);
      right[i] = ok ? 1 + (i + 1 < n - delta ? right[i + 1] : 0) : 0;
    }
    for (std::size_t i = 0; i + delta < n; ++i) {
      const bool ok = i >= 1 && p.gap_id(i - 1) == p.gap_id(i + delta - 1);
      left[i] = ok ? 1 + left[i - 1] : 0;
    }
    for (std::size_t i = 0; i + delta < n; ++i) {
      const std::size_t j = i + delta;
      if (!is_anchor[i] || !is_anchor[j]) continue;
      // Cheap upper estimate: offsets just past the common run on each side.
      const std::size_t rr = right[i], ll = left[i];
      const double up_r = (j + rr + 1 < n) ? std::max(p.approx(i + rr + 1) - p.approx(i), p.approx(j + rr + 1) - p.approx(j))
                                           : std::numeric_limits<double>::infinity();
      const double up_l = (i >= ll + 1) ? std::max(p.approx(i) - p.approx(i - ll - 1), p.approx(j) - p.approx(j - ll - 1))
                                        : std::numeric_limits<double>::infinity();
      if (std::min(up_r, up_l) < dlo - detail::tolerance(dlo, dlo)) continue;
      Recurrence rec = detail::combine_sides(i, j, detail::side_agreement(p, i, j, ll, -1),
                                             detail::side_agreement(p, i, j, rr, +1));
      if (rec.censored || lo_sq <= rec.size_sq) visit(rec);
    }
  }
}

/// All ordered anchor pairs with agreement radius in [r_lo, r_hi); censored
/// pairs are included (flagged) when their known lower bound is below r_hi.
inline std::vector<Recurrence> find_recurrences(const PatternSample& p, const ExactScalar& r_lo, const ExactScalar& r_hi) {
  std::vector<Recurrence> out;
  const ExactScalar hi_sq = r_hi * r_hi;
  for_each_agreement(p, r_lo, [&](const Recurrence& rec) {
    if (!(rec.size_sq < hi_sq)) return;
    out.push_back(rec);
    Recurrence back = rec;
    std::swap(back.first, back.second);
    out.push_back(std::move(back));
  });
  std::sort(out.begin(), out.end(), [](const Recurrence& a, const Recurrence& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });
  return out;
}

/// Voronoi cell [midpoint(prev, p), midpoint(p, next)] of an interior point.
struct VoronoiCell {
  std::size_t point = 0;
  ExactScalar lo;
  ExactScalar hi;
};

inline std::vector<VoronoiCell> voronoi_1d(const PatternSample& p) {
  if (p.dim() != 1) throw PreconditionError("Voronoi cells are only implemented in dimension 1");
  std::vector<VoronoiCell> cells;
  const ExactScalar half = make_rational(1, 2);
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    cells.push_back({i, half * (p.x(i - 1) + p.x(i)), half * (p.x(i) + p.x(i + 1))});
  }
  return cells;
}

}  // namespace apd

#endif  // APD_PATTERNS_HPP
