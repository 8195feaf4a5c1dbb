#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <set>

#include "apd/deform.hpp"
#include "fixtures.hpp"

using apd::ExactScalar;
using apd::ExactVector;
using apd::make_rational;

namespace {

ExactScalar q(long n, long d = 1) { return ExactScalar(make_rational(n, d)); }
const ExactScalar kTau = apd::golden_ratio();

apd::PatternPtr fib(int k) { return std::make_shared<const apd::PatternSample>(fixtures::fibonacci(k)); }

apd::Deformation letters(const apd::PatternPtr& p, int k, const ExactScalar& fa, const ExactScalar& fb) {
  const auto g = apd::build_ap_graph(*p, k);
  return apd::apply_deformation(p, k, apd::cochain_from_letters(g, {{'a', fa}, {'b', fb}}));
}

// A_P of a Fibonacci word from integer pairs (m + n tau), in doubles.
double oracle_a(const std::string& word, double s) {
  const auto pts = fixtures::fibonacci_pairs(word);
  const double total = fixtures::value(pts.back());
  std::set<fixtures::Pair> offsets;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = fixtures::value(pts[i]);
    if (x - s < 0 || x + s > total) continue;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      fixtures::Pair d{pts[j].first - pts[i].first, pts[j].second - pts[i].second};
      if (std::fabs(fixtures::value(d)) < s) offsets.insert(d);
    }
  }
  std::vector<double> v;
  for (const auto& o : offsets) v.push_back(fixtures::value(o));
  std::sort(v.begin(), v.end());
  double best = INFINITY;
  for (std::size_t i = 1; i < v.size(); ++i) best = std::min(best, v[i] - v[i - 1]);
  return best;
}

std::multiset<std::string> gap_multiset(const apd::PatternSample& p) {
  std::multiset<std::string> out;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) out.insert(p.gap(i).str());
  return out;
}

}  // namespace

TEST(ApplyDeformation, IdentityIsExact) {
  const auto p = fib(10);
  for (int k = 0; k <= 2; ++k) {
    const auto g = apd::build_ap_graph(*p, k);
    const auto d = apd::apply_deformation(p, k, g.lengths);
    EXPECT_TRUE(d.distortion.is_zero());
    for (std::size_t i = d.first; i <= d.last(); ++i) EXPECT_EQ(d.deformed->point(i - d.first), p->point(i));
    EXPECT_EQ(d.deformed->tiles(), p->tiles().substr(d.first, d.last() - d.first));
  }
}

TEST(ApplyDeformation, CollapseToIntegers) {
  const auto p = fib(10);
  const auto d = letters(p, 0, q(1), q(1));
  for (std::size_t i = 0; i < d.deformed->size(); ++i) EXPECT_EQ(d.deformed->x(i), ExactScalar(static_cast<long>(i)));
  // (tau - 1) / tau = 2 - tau.
  EXPECT_EQ(d.distortion, q(2) - kTau);
  EXPECT_NEAR(d.distortion.to_double(), (fixtures::kTau - 1) / fixtures::kTau, 1e-15);
  EXPECT_EQ(apd::classify_patches(*d.deformed, q(5)).classes.size(), 1u);
}

TEST(ApplyDeformation, SmallStretchStaysAperiodic) {
  const auto p = fib(11);
  const auto d = letters(p, 0, kTau + q(1, 100), q(1));
  EXPECT_EQ(d.distortion, q(1, 100) / kTau);
  EXPECT_NEAR(d.distortion.to_double(), 0.01 / fixtures::kTau, 1e-15);
  EXPECT_EQ(d.deformed->gap_values().size(), 2u);
  EXPECT_EQ(apd::classify_patches(*d.deformed, q(5, 2)).classes.size(),
            apd::classify_patches(*p, q(5, 2)).classes.size());
}

TEST(ApplyDeformation, RejectsNonPositiveLengths) {
  const auto p = fib(8);
  EXPECT_THROW(letters(p, 0, q(1), q(0)), apd::InadmissibleError);
  EXPECT_THROW(letters(p, 0, q(1), -kTau), apd::InadmissibleError);
  const auto g = apd::build_ap_graph(*p, 1);
  EXPECT_THROW(apd::cochain_from_words(g, {{"aab", q(1)}}), apd::ConfigError);
}

TEST(ApplyDeformation, PositiveLengthsGiveIncreasingPositions) {
  std::mt19937_64 rng(11);
  const auto p = fib(10);
  const auto g = apd::build_ap_graph(*p, 2);
  for (int t = 0; t < 10; ++t) {
    const auto d = apd::apply_deformation(p, 2, apd::random_cocycle(g, 0.9, rng));
    for (std::size_t i = 1; i < d.deformed->size(); ++i) EXPECT_LT(d.deformed->x(i - 1), d.deformed->x(i));
  }
}

TEST(ApplyDeformation, CoboundaryOfConstantChangesNothing) {
  const auto p = fib(10);
  const auto g = apd::build_ap_graph(*p, 1);
  std::mt19937_64 rng(5);
  const auto f = apd::random_cocycle(g, 0.2, rng);
  auto shifted = f;
  const auto delta = apd::coboundary(g, std::vector<ExactScalar>(g.vertex_count, q(7, 3)));
  for (std::size_t e = 0; e < f.size(); ++e) shifted[e] += delta[e];
  const auto a = apd::apply_deformation(p, 1, f);
  const auto b = apd::apply_deformation(p, 1, shifted);
  EXPECT_EQ(a.distortion, b.distortion);
  EXPECT_EQ(gap_multiset(*a.deformed), gap_multiset(*b.deformed));
}

TEST(RandomCocycle, BoundedAndReproducible) {
  const auto g = apd::build_ap_graph(fixtures::fibonacci(10), 2);
  std::mt19937_64 r1(42), r2(42);
  for (int t = 0; t < 20; ++t) {
    const auto f1 = apd::random_cocycle(g, 0.05, r1);
    EXPECT_EQ(f1, apd::random_cocycle(g, 0.05, r2));
    for (std::size_t e = 0; e < f1.size(); ++e) {
      const ExactScalar u = f1[e] / g.lengths[e] - 1;
      EXPECT_LT(u.abs(), q(5, 100));
      EXPECT_TRUE((u * 1000000).is_rational());
    }
  }
}

TEST(EpsilonBound, IntegersMatchQuadraticRoot) {
  const auto z = fixtures::integers(0, 200);
  const auto eps = apd::epsilon_bound(z, q(2));
  // 4t = (1 - t)^2.
  EXPECT_NEAR(eps.epsilon, 3.0 - 2.0 * std::sqrt(2.0), 2e-6);
  EXPECT_FALSE(eps.censored);
  for (long r : {1, 3, 5}) {
    const double rr = static_cast<double>(r);
    const double root = (1 + rr) - std::sqrt((1 + rr) * (1 + rr) - 1);
    EXPECT_NEAR(apd::epsilon_bound(z, q(r)).epsilon, root, 2e-6) << r;
  }
}

TEST(EpsilonBound, NonIncreasingInRadius) {
  const auto f = fixtures::fibonacci(13);
  const auto z = fixtures::integers(0, 300);
  double prev_f = 1.0, prev_z = 1.0;
  for (const auto& r : {q(3, 2), q(2), kTau * 2, q(4), q(6)}) {
    const double ef = apd::epsilon_bound(f, r).epsilon;
    const double ez = apd::epsilon_bound(z, r).epsilon;
    EXPECT_LE(ef, prev_f + 1e-6);
    EXPECT_LE(ez, prev_z + 1e-6);
    prev_f = ef;
    prev_z = ez;
  }
}

TEST(EpsilonBound, FibonacciMatchesScan) {
  const int k = 12;
  const auto p = fixtures::fibonacci(k);
  const double r = 2 * fixtures::kTau;
  const auto eps = apd::epsilon_bound(p, kTau * 2);
  EXPECT_GT(eps.epsilon, 0.0);
  EXPECT_FALSE(eps.censored);
  const auto word = fixtures::fibonacci_word(k);
  double scan = 0.0;
  for (double t = 1e-5; t < 0.5; t += 1e-5) {
    const double s = r / ((1 - t) * (1 - t));
    if (2 * t * s <= oracle_a(word, s)) scan = t;
    else break;
  }
  EXPECT_NEAR(eps.epsilon, scan, 2e-5);
  // The bound sits where the offset tau + 2 enters the patches.
  EXPECT_NEAR(eps.epsilon, 1 - std::sqrt(r / (fixtures::kTau + 2)), 2e-6);
}

TEST(InvertCheck, IdentityGivesSameRadius) {
  const auto p = fib(12);
  const auto d = apd::apply_deformation(p, 0, apd::build_ap_graph(*p, 0).lengths);
  for (const auto& r : {q(6, 5), kTau * 2, q(4)}) {
    const auto v = apd::invert_check(d, r, q(20));
    ASSERT_TRUE(v.found());
    EXPECT_EQ(*v.anchors.r_prime, r);
    ASSERT_TRUE(v.midpoints.r_prime.has_value());
    EXPECT_EQ(*v.midpoints.r_prime, r);
  }
}

TEST(InvertCheck, CollapseFails) {
  const auto p = fib(12);
  const auto d = letters(p, 0, q(1), q(1));
  const auto v = apd::invert_check(d, kTau * 2, q(20));
  EXPECT_FALSE(v.found());
  EXPECT_EQ(v.candidates.size(), 1u + 17u);  // r and the integers 4..20, the last being the search limit
  ASSERT_TRUE(v.anchors.witness.has_value());
  const auto [x, y] = *v.anchors.witness;
  EXPECT_NE(apd::extract_patch(*p, p->point(x), kTau * 2), apd::extract_patch(*p, p->point(y), kTau * 2));
  const auto back = apd::derive_back_check(d, {q(0), q(2), q(5), q(10), q(20)});
  EXPECT_FALSE(back.radius.has_value());
}

TEST(InvertCheck, SmallRandomCocyclesInvertWithinBound) {
  const auto p = std::make_shared<const apd::PatternSample>(fixtures::fibonacci(13));
  const ExactScalar r = kTau * 2;
  const auto eps = apd::epsilon_bound(*p, r);
  const ExactScalar eq(apd::rational_from_double(eps.epsilon));
  const auto g = apd::build_ap_graph(*p, 1);
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 10; ++t) {
    const auto d = apd::apply_deformation(p, 1, apd::random_cocycle(g, eps.epsilon, rng));
    ASSERT_LT(d.distortion, eq);
    const auto v = apd::invert_check(d, r, q(20));
    ASSERT_TRUE(v.found());
    const ExactScalar bound = apd::ceil_to_patch_step(d, r / (ExactScalar(1) - eq), q(20));
    EXPECT_LE(*v.anchors.r_prime, bound) << t;
    // Inclusions around S_{r'} with eps = distortion.
    for (const auto& rp : {q(2), q(4), q(7)}) {
      const auto inc = apd::lemma10_inclusions(d, d.distortion, rp);
      EXPECT_GT(inc.anchors, 100u);
      EXPECT_TRUE(inc.left && inc.right) << t << " " << rp.str();
    }
  }
}

TEST(InvertCheck, InclusionDetectsUnderstatedEpsilon) {
  const auto p = fib(11);
  const auto d = letters(p, 0, kTau, q(1, 2));  // b halved: distortion 1/2
  EXPECT_TRUE(apd::lemma10_inclusions(d, d.distortion, q(3)).right);
  const auto inc = apd::lemma10_inclusions(d, q(0), q(3));
  EXPECT_FALSE(inc.left && inc.right);
  EXPECT_TRUE(inc.witness.has_value());
}

TEST(DeriveBack, IdentityAtZero) {
  const auto p = fib(10);
  const auto d = apd::apply_deformation(p, 0, apd::build_ap_graph(*p, 0).lengths);
  const auto v = apd::derive_back_check(d, {q(0), q(1)});
  ASSERT_TRUE(v.radius.has_value());
  EXPECT_EQ(*v.radius, q(0));
}

TEST(DeriveBack, BoundedPerturbationPasses) {
  const auto p = fib(12);
  const auto g = apd::build_ap_graph(*p, 1);
  // lengths + coboundary of small vertex values: phi - id is bounded and local.
  std::vector<ExactScalar> vals;
  for (std::size_t v = 0; v < g.vertex_count; ++v) vals.push_back(q(static_cast<long>(v) + 1, 20));
  auto f = g.lengths;
  const auto delta = apd::coboundary(g, vals);
  for (std::size_t e = 0; e < f.size(); ++e) f[e] += delta[e];
  const auto d = apd::apply_deformation(p, 1, f);
  EXPECT_GT(d.distortion.sign(), 0);
  const auto v = apd::derive_back_check(d, {q(1, 2), q(2), q(4), q(8)});
  ASSERT_TRUE(v.radius.has_value());
  EXPECT_LE(*v.radius, q(8));
}

TEST(HullMapPhi, TransversalAndIdentity) {
  const auto p = fib(11);
  const auto id = apd::apply_deformation(p, 0, apd::build_ap_graph(*p, 0).lengths);
  const auto d = letters(p, 0, kTau + q(1, 10), q(1) - kTau / 10);
  const ExactScalar r = q(3);
  std::size_t checked = 0;
  for (std::size_t i = 10; i + 10 < p->size(); ++i) {
    const ExactVector x = p->point(i);
    const ExactVector mid((p->x(i) + p->x(i + 1)) / 2);
    EXPECT_EQ(apd::hull_map_phi(id, x, r), apd::extract_patch(*p, x, r));
    EXPECT_TRUE(apd::hull_map_phi(d, x, r).contains_origin());
    EXPECT_FALSE(apd::hull_map_phi(d, mid, r).contains_origin());
    ++checked;
  }
  EXPECT_GT(checked, 100u);
  EXPECT_THROW(apd::hull_map_phi(d, p->point(1), r), apd::WindowError);
}

TEST(HullMapPhi, EqualSourcePatchesGiveEqualImages) {
  const auto p = fib(12);
  const auto g = apd::build_ap_graph(*p, 1);
  std::mt19937_64 rng(3);
  const auto d = apd::apply_deformation(p, 1, apd::random_cocycle(g, 0.2, rng));
  const ExactScalar r = q(3);
  const ExactScalar rp = r * d.lambda() + g.loop_span;
  std::map<apd::PatchKey, apd::Patch> seen;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < p->size(); ++i) {
    const ExactVector x = p->point(i);
    if (!p->ball_inside(i, rp + 2)) continue;
    apd::Patch image;
    try {
      image = apd::hull_map_phi(d, x, r);
    } catch (const apd::WindowError&) {
      continue;
    }
    auto [it, fresh] = seen.emplace(apd::patch_key_at(*p, i, rp), image);
    if (!fresh) {
      EXPECT_EQ(it->second, image);
      ++pairs;
    }
  }
  EXPECT_GT(pairs, 100u);
}

TEST(HullMapG, IdentityIsTranslation) {
  const auto p = fib(10);
  apd::SiteFunction<ExactVector> zero;
  zero.pattern = p;
  for (std::size_t i = 0; i < p->size(); ++i) {
    zero.domain.push_back(i);
    zero.values.push_back(ExactVector(q(0)));
  }
  const apd::HullMapG h(p, apd::LinearMap::identity(1), zero);
  for (const auto& x : {ExactVector(q(20)), ExactVector(q(41, 3)), p->point(30)})
    EXPECT_EQ(h(x, q(5)), apd::extract_patch(*p, x, q(5)));
}

TEST(HullMapG, DoublingOnIntegers) {
  const auto z = std::make_shared<const apd::PatternSample>(fixtures::integers(0, 100));
  apd::SiteFunction<ExactVector> zero;
  zero.pattern = z;
  for (std::size_t i = 0; i < z->size(); ++i) {
    zero.domain.push_back(i);
    zero.values.push_back(ExactVector(q(0)));
  }
  const apd::HullMapG h(z, apd::LinearMap::scalar(1, q(2)), zero);
  for (std::size_t i = 0; i < h.image().size(); ++i) EXPECT_EQ(h.image().x(i), q(2 * static_cast<long>(i)));
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long> num(400, 1600), shift(-300, 300);
  for (int t = 0; t < 200; ++t) {
    const ExactVector x(q(num(rng), 20)), v(q(shift(rng), 20));
    const ExactScalar r = q(6);
    const auto moved = h(x + v, r);
    // Phi_g(P - x - v) = Phi_g(P - x) - g(v).
    const ExactVector gv = h.g()(v);
    const auto wide = h(x, r + gv[0].abs());
    std::vector<ExactVector> expect;
    for (const auto& o : wide.offsets)
      if ((o - gv).norm_sq() < r * r) expect.push_back(o - gv);
    EXPECT_EQ(moved.offsets, expect);
  }
}

TEST(HullMapG, LocalPerturbationIsLocal) {
  const auto p = fib(12);
  apd::SiteFunction<ExactVector> eta;
  eta.pattern = p;
  for (std::size_t i = 0; i + 1 < p->size(); ++i) {
    eta.domain.push_back(i);
    eta.values.push_back(ExactVector(p->gap(i) / 10));  // depends on the 1.7-patch
  }
  const apd::HullMapG h(p, apd::LinearMap::scalar(1, q(2)), eta);
  const ExactScalar r = q(3), range = q(17, 10);
  // Radius in the source covering all image points within r of g(x).
  const ExactScalar reach = r / 2 + q(1) + range;
  std::map<apd::PatchKey, apd::Patch> seen;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < p->size(); ++i) {
    if (!p->ball_inside(i, reach + 2)) continue;
    apd::Patch image;
    try {
      image = h(p->point(i), r);
    } catch (const apd::WindowError&) {
      continue;
    }
    auto [it, fresh] = seen.emplace(apd::patch_key_at(*p, i, reach), image);
    if (!fresh) {
      EXPECT_EQ(it->second, image);
      ++pairs;
    }
  }
  EXPECT_GT(pairs, 100u);
}

TEST(HullMapG, SemiConjugacyDiffersFromTransversalMap) {
  const auto p = fib(12);
  const auto d = letters(p, 0, kTau + q(1, 10), q(1) - kTau / 10);
  const apd::HullMapG h(p, apd::LinearMap::identity(1), apd::displacement(d));
  std::optional<std::size_t> witness;
  for (std::size_t i = 40; i + 40 < p->size(); ++i) {
    const auto a = h(p->point(i), q(3));
    const auto b = apd::hull_map_phi(d, p->point(i), q(3));
    EXPECT_TRUE(b.contains_origin());
    if (!(a == b)) {
      witness = i;
      break;
    }
  }
  EXPECT_TRUE(witness.has_value());
}

TEST(ProductDeformation, IdentityAndShear) {
  const auto x = fixtures::fibonacci(5);
  const auto y = fixtures::fibonacci(4);
  std::map<apd::ProductEdgeClass, ExactVector> id, shear;
  for (char l : {'a', 'b'})
    for (char c : {'a', 'b'}) {
      const ExactScalar len = l == 'a' ? kTau : q(1);
      id[{0, l, c}] = ExactVector(len, q(0));
      id[{1, l, c}] = ExactVector(q(0), len);
      shear[{0, l, c}] = ExactVector(len, q(0));
      shear[{1, l, c}] = ExactVector(len / 4, len);
    }
  const auto a = apd::apply_product_deformation(x, y, id);
  EXPECT_TRUE(a.distortion_sq.is_zero());
  EXPECT_EQ(a.deformed.size(), (x.size() - 1) * (y.size() - 1));
  for (const auto& pt : a.deformed.points()) {
    EXPECT_TRUE(x.find(ExactVector(pt[0])).has_value());
    EXPECT_TRUE(y.find(ExactVector(pt[1])).has_value());
  }
  const auto s = apd::apply_product_deformation(x, y, shear);
  EXPECT_EQ(s.distortion_sq, q(1, 16));
  EXPECT_GT(s.rectangles, 0u);
  EXPECT_TRUE(s.deformed.find(ExactVector(x.x(1), y.x(1))).has_value());
  EXPECT_TRUE(s.deformed.find(ExactVector(x.x(1) + (y.x(2) - y.x(1)) / 4, y.x(2))).has_value());
}

TEST(ProductDeformation, ClosureViolationRejected) {
  const auto x = fixtures::fibonacci(5);
  const auto y = fixtures::fibonacci(4);
  std::map<apd::ProductEdgeClass, ExactVector> f;
  for (char l : {'a', 'b'})
    for (char c : {'a', 'b'}) {
      const ExactScalar len = l == 'a' ? kTau : q(1);
      f[{0, l, c}] = ExactVector(len, q(0));
      f[{1, l, c}] = ExactVector(q(0), len);
    }
  f[{0, 'a', 'b'}] = ExactVector(kTau + q(1, 10), q(0));
  EXPECT_THROW(apd::apply_product_deformation(x, y, f), apd::InadmissibleError);
  f.erase({1, 'b', 'a'});
  EXPECT_THROW(apd::apply_product_deformation(x, y, f), apd::ConfigError);
}

TEST(Negligibility, EigenPerturbationDecaysRandomDoesNot) {
  const auto p = fib(13);
  const auto eig = letters(p, 0, kTau + q(1, 10), q(1) - kTau / 10);
  std::vector<ExactScalar> radii;
  ExactScalar r = q(5, 2);
  for (int j = 0; j < 4; ++j, r = r * kTau) radii.push_back(r);
  const auto rows = apd::negligibility_profile(eig, radii);
  EXPECT_LT(rows.back().sup, rows.front().sup * 0.5);
  const auto stretch = letters(p, 0, kTau + q(1, 10), q(1));
  const auto rows2 = apd::negligibility_profile(stretch, radii);
  EXPECT_GE(rows2.back().sup, rows2.front().sup * 0.5);
}
