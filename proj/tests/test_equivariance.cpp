#include <gtest/gtest.h>

#include <memory>
#include <random>

#include "apd/equivariance.hpp"
#include "fixtures.hpp"

using apd::ExactScalar;
using apd::ExactVector;
using apd::make_rational;

namespace {

ExactScalar q(long n, long d = 1) { return ExactScalar(make_rational(n, d)); }
const ExactScalar kTau = apd::golden_ratio();

apd::PatternPtr fib(int k) { return std::make_shared<const apd::PatternSample>(fixtures::fibonacci(k)); }

// Value at p_i of the gap to its right neighbour.
apd::SiteFunction<ExactScalar> next_gap(const apd::PatternPtr& p) {
  apd::SiteFunction<ExactScalar> f;
  f.pattern = p;
  for (std::size_t i = 0; i + 1 < p->size(); ++i) {
    f.domain.push_back(i);
    f.values.push_back(p->gap(i));
  }
  return f;
}

apd::PatternSample subset(const apd::PatternSample& p, const std::vector<std::size_t>& keep) {
  std::vector<ExactVector> pts;
  for (auto i : keep) pts.push_back(p.point(i));
  return apd::PatternSample(p.field(), pts, p.window());
}

}  // namespace

TEST(EquivarianceRange, ConstantPassesAtZero) {
  const auto p = fib(10);
  const auto f = apd::make_site_function(p, [](std::size_t) { return ExactScalar(7); });
  const auto res = apd::equivariance_range(f, {q(0), q(1), q(2)});
  ASSERT_TRUE(res.range.has_value());
  EXPECT_EQ(*res.range, q(0));
}

TEST(EquivarianceRange, NextGapSeenAcrossLongGap) {
  const auto p = fib(11);
  const auto res = apd::equivariance_range(next_gap(p), {q(9, 10), q(17, 10), q(3)});
  ASSERT_TRUE(res.range.has_value());
  EXPECT_EQ(*res.range, q(17, 10));
  EXPECT_FALSE(res.probes[0].passed);
  ASSERT_TRUE(res.probes[0].witness.has_value());
  const auto [a, b] = *res.probes[0].witness;
  EXPECT_NE(p->gap(a), p->gap(b));
}

TEST(EquivarianceRange, IdentityNeverEquivariant) {
  const auto p = fib(11);
  const auto id = apd::make_site_function(p, [&](std::size_t i) { return p->point(i); });
  const auto res = apd::equivariance_range(id, {q(0), q(2), q(5), q(10), q(20)});
  EXPECT_FALSE(res.range.has_value());
  for (const auto& probe : res.probes) {
    ASSERT_TRUE(probe.witness.has_value());
    EXPECT_NE(p->point(probe.witness->first), p->point(probe.witness->second));
    EXPECT_EQ(apd::extract_patch(*p, p->point(probe.witness->first), probe.radius),
              apd::extract_patch(*p, p->point(probe.witness->second), probe.radius));
  }
}

TEST(EquivarianceRange, MonotoneInRadius) {
  const auto p = fib(11);
  for (std::size_t shift = 0; shift < 5; ++shift) {
    apd::SiteFunction<ExactScalar> f;
    f.pattern = p;
    for (std::size_t i = 0; i + shift + 1 < p->size(); ++i) {
      f.domain.push_back(i);
      f.values.push_back(p->gap(i + shift));
    }
    std::vector<ExactScalar> radii;
    for (long t = 0; t <= 40; t += 3) radii.push_back(q(t, 4));
    const auto res = apd::equivariance_range(f, radii);
    bool passed = false;
    for (const auto& probe : res.probes) {
      if (passed) {
        EXPECT_TRUE(probe.passed) << "shift " << shift << " r " << probe.radius.str();
      }
      passed = passed || probe.passed;
    }
    EXPECT_TRUE(passed);
  }
}

TEST(DeltaH, IdentityGivesConstant) {
  const auto p = fib(9);
  const auto id = apd::make_site_function(p, [&](std::size_t i) { return p->point(i); });
  const ExactVector h(kTau + 1);
  const auto d = apd::delta_h(id, h);
  EXPECT_FALSE(d.domain.empty());
  for (const auto& v : d.values) EXPECT_EQ(v, h);
  for (auto i : d.domain) EXPECT_TRUE(p->find(p->point(i) + h).has_value());
}

TEST(DeltaH, ConstantGivesZero) {
  const auto p = fib(9);
  const auto c = apd::make_site_function(p, [](std::size_t) { return ExactScalar(3); });
  const auto d = apd::delta_h(c, ExactVector(q(1)));
  EXPECT_FALSE(d.domain.empty());
  for (const auto& v : d.values) EXPECT_TRUE(v.is_zero());
  EXPECT_TRUE(apd::delta_h(c, ExactVector(q(1, 3))).domain.empty());
}

TEST(LocalDerivability, SelfDerivable) {
  const auto p = fixtures::fibonacci(9);
  for (const auto& r : {q(0), q(1), q(3)}) EXPECT_TRUE(apd::is_locally_derivable(p, p, r).derivable);
}

TEST(LocalDerivability, LongGapStarts) {
  const auto p = fixtures::fibonacci(10);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (p.gap(i) == kTau) keep.push_back(i);
  const auto qset = subset(p, keep);
  EXPECT_TRUE(apd::is_locally_derivable(p, qset, q(17, 10)).derivable);
  const auto fail = apd::is_locally_derivable(p, qset, q(1, 2));
  EXPECT_FALSE(fail.derivable);
  ASSERT_TRUE(fail.witness.has_value());
  EXPECT_NE(qset.find(fail.witness->first).has_value(), qset.find(fail.witness->second).has_value());
}

TEST(LocalDerivability, PeriodicCannotDeriveAperiodic) {
  const auto z = fixtures::integers(0, 150);
  const auto f = fixtures::fibonacci(10);  // length about 144
  for (const auto& r : {q(1), q(5), q(20), q(40)}) {
    const auto v = apd::is_locally_derivable(z, f, r);
    EXPECT_FALSE(v.derivable) << r.str();
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_NE(f.find(v.witness->first).has_value(), f.find(v.witness->second).has_value());
  }
}

TEST(WeakEquivariance, StrongFunctionHasZeroOscillation) {
  const auto p = fib(11);
  const auto res = apd::weak_equivariance_test(next_gap(p), 1e-12, q(17, 10));
  EXPECT_TRUE(res.passed);
  EXPECT_EQ(res.max_oscillation, 0.0);
  // Cells are functions of the patch.
  for (std::size_t a = 0; a < res.anchors.size(); ++a)
    for (std::size_t b = a + 1; b < std::min(res.anchors.size(), a + 30); ++b) {
      const bool same_patch = apd::extract_patch(*p, p->point(res.anchors[a]), res.radius) ==
                              apd::extract_patch(*p, p->point(res.anchors[b]), res.radius);
      EXPECT_EQ(same_patch, res.cell[a] == res.cell[b]);
    }
}

TEST(WeakEquivariance, IdentityFails) {
  const auto p = fib(11);
  const auto id = apd::make_site_function(p, [&](std::size_t i) { return p->x(i); });
  for (const auto& r : {q(1), q(5), q(15)}) {
    const auto res = apd::weak_equivariance_test(id, 0.5, r);
    EXPECT_FALSE(res.passed);
    ASSERT_TRUE(res.witness.has_value());
    EXPECT_GT(std::fabs(p->approx(res.witness->first) - p->approx(res.witness->second)), 0.5);
  }
}

TEST(Bump, NormalizationAndSupport) {
  for (double r : {0.1, 0.25, 0.5}) {
    const auto b = apd::Bump::normalized(r);
    EXPECT_NEAR(b.integral(), 1.0, 1e-12);
    EXPECT_NEAR(b.cdf(0.0), 0.5, 1e-12);
    EXPECT_EQ(b(r), 0.0);
    EXPECT_EQ(b(-r), 0.0);
    EXPECT_GT(b(0.0), 0.0);
  }
  EXPECT_DOUBLE_EQ(apd::Bump::unit_peak(0.3)(0.0), 1.0);
  EXPECT_THROW(apd::Bump::normalized(0.0), apd::PreconditionError);
}

TEST(Mollify, ConstantStaysConstant) {
  const auto p = fib(9);
  const auto c = apd::make_site_function(p, [](std::size_t) { return 2.5; });
  const auto field = apd::mollify_extend(c, 0.4);
  const auto s = apd::sample_field(field, 2000);
  for (double v : s.values) EXPECT_NEAR(v, 2.5, 1e-12);
  for (double d : s.derivative) EXPECT_NEAR(d, 0.0, 1e-9);
}

TEST(Mollify, IntegerIdentity) {
  const auto z = std::make_shared<const apd::PatternSample>(fixtures::integers(0, 40));
  const auto id = apd::make_site_function(z, [&](std::size_t i) { return z->x(i); });
  const auto field = apd::mollify_extend(id, 0.5);
  for (long i = 1; i < 40; ++i) EXPECT_NEAR(field.value(static_cast<double>(i)), static_cast<double>(i), 1e-9);
  // d phi is 1-periodic.
  for (double x = 3.0; x < 4.0; x += 0.037) {
    EXPECT_NEAR(field.derivative(x), field.derivative(x + 1.0), 1e-9);
    EXPECT_NEAR(field.finite_difference(x, 1e-5), field.finite_difference(x + 7.0, 1e-5), 1e-6);
    EXPECT_NEAR(field.finite_difference(x, 1e-5), field.derivative(x), 1e-6);
  }
  const auto range = apd::field_equivariance_range(
      *z, 1, 39, [&](double x) { return field.finite_difference(x, 1e-5); }, {q(0), q(1), q(2)}, 8, 1e-6);
  ASSERT_TRUE(range.range.has_value());
  EXPECT_EQ(*range.range, q(1));
}

TEST(Mollify, RejectsWideBump) {
  const auto p = fib(8);
  const auto c = apd::make_site_function(p, [](std::size_t) { return 1.0; });
  EXPECT_THROW(apd::mollify_extend(c, 0.6), apd::PreconditionError);
}

TEST(SumExtension, ReproducesAtPoints) {
  const auto p = fib(9);
  const auto f = apd::make_site_function(p, [&](std::size_t i) { return p->approx(i) * 0.5; });
  const apd::SumExtension ext(f, 0.5);
  for (std::size_t i = 0; i < p->size(); ++i) EXPECT_NEAR(ext.value(p->approx(i)), p->approx(i) * 0.5, 1e-12);
}
