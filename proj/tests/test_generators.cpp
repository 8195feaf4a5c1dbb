#include <gtest/gtest.h>

#include <algorithm>

#include "apd/generators.hpp"
#include "fixtures.hpp"

using apd::ExactScalar;
using apd::ExactVector;
using apd::make_rational;

namespace {

ExactScalar q(long n, long d = 1) { return ExactScalar(make_rational(n, d)); }
const ExactScalar kTau = apd::golden_ratio();

// Word length after k steps from the matrix-power oracle: sum of M^k e_seed.
long word_length_oracle(const apd::SubstitutionRule& rule, char seed, int k) {
  const auto m = rule.matrix();
  std::vector<long> v(rule.alphabet.size(), 0);
  v[rule.index(seed)] = 1;
  for (int s = 0; s < k; ++s) {
    std::vector<long> w(v.size(), 0);
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) w[i] += m(i, j).get_num().get_si() * v[j];
    v = w;
  }
  long total = 0;
  for (long x : v) total += x;
  return total;
}

}  // namespace

TEST(Substitution, FibonacciWord) {
  const auto rule = apd::builtin_rule("fibonacci");
  EXPECT_EQ(apd::substitution_fixed_word(rule, 'a', 4), "abaababa");
  EXPECT_EQ(apd::substitution_fixed_word(rule, 'a', 0), "a");
  for (int k = 0; k <= 16; ++k) {
    EXPECT_EQ(static_cast<long>(apd::substitution_fixed_word(rule, 'a', k).size()), word_length_oracle(rule, 'a', k));
    EXPECT_EQ(apd::substitution_fixed_word(rule, 'a', k), fixtures::fibonacci_word(k));
  }
  EXPECT_EQ(word_length_oracle(rule, 'a', 4), 8);
  EXPECT_THROW(apd::substitution_fixed_word(rule, 'c', 2), apd::ConfigError);
}

TEST(Substitution, NaturalLengths) {
  const auto fib = apd::builtin_rule("fibonacci");
  EXPECT_EQ(fib.length('a'), kTau);
  EXPECT_EQ(fib.length('b'), q(1));
  EXPECT_EQ(fib.lambda, kTau);
  const auto silver = apd::builtin_rule("silver");
  EXPECT_EQ(silver.length('a'), ExactScalar(1, 1, 2));
  EXPECT_EQ(silver.length('b'), q(1));
  EXPECT_EQ(silver.lambda, ExactScalar(1, 1, 2));
  const auto pd = apd::builtin_rule("period-doubling");
  EXPECT_EQ(pd.length('a'), q(1));
  EXPECT_EQ(pd.length('b'), q(1));
  EXPECT_EQ(pd.lambda, q(2));
  EXPECT_EQ(apd::builtin_rule("periodic").length('a'), q(1));
}

TEST(Substitution, EigenvectorIdentityExact) {
  for (const char* name : {"fibonacci", "silver", "period-doubling", "periodic"}) {
    const auto rule = apd::builtin_rule(name);
    for (char l : rule.alphabet) {
      ExactScalar s;
      for (char c : rule.images.at(l)) s += rule.length(c);
      EXPECT_EQ(s, rule.lambda * rule.length(l)) << name;
    }
  }
}

TEST(Substitution, ExplicitLengthsValidated) {
  std::map<char, ExactScalar> good{{'a', kTau}, {'b', q(1)}};
  EXPECT_NO_THROW(apd::make_rule("fib", "ab", {{'a', "ab"}, {'b', "a"}}, 5, good));
  std::map<char, ExactScalar> bad{{'a', q(2)}, {'b', q(1)}};
  EXPECT_THROW(apd::make_rule("fib", "ab", {{'a', "ab"}, {'b', "a"}}, 5, bad), apd::ConfigError);
}

TEST(Substitution, RejectsInvalidRules) {
  EXPECT_THROW(apd::make_rule("id", "ab", {{'a', "a"}, {'b', "b"}}, 0), apd::ConfigError);
  EXPECT_THROW(apd::make_rule("x", "ab", {{'a', "ac"}, {'b', "a"}}, 5), apd::ConfigError);
  // Plastic-number substitution: eigenvalue is cubic.
  EXPECT_THROW(apd::make_rule("cubic", "abc", {{'a', "ab"}, {'b', "c"}, {'c', "a"}}, 5), apd::ConfigError);
  EXPECT_THROW(apd::make_rule("fib", "ab", {{'a', "ab"}, {'b', "a"}}, 2), apd::ConfigError);
  EXPECT_THROW(apd::builtin_rule("penrose"), apd::ConfigError);
}

TEST(Realize, PartialSums) {
  const auto fib = apd::builtin_rule("fibonacci");
  const auto p = apd::realize_points(fib, "ab");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p.x(0), q(0));
  EXPECT_EQ(p.x(1), kTau);
  EXPECT_EQ(p.x(2), kTau + 1);
  EXPECT_EQ(p.window().hi[0], kTau + 1);
  const auto big = fixtures::fibonacci(14);
  for (const auto& g : big.gap_values()) EXPECT_TRUE(g == q(1) || g == kTau);
  EXPECT_EQ(big.gap_values().size(), 2u);
}

TEST(Realize, LetterFrequencyRatio) {
  const auto w = apd::substitution_fixed_word(apd::builtin_rule("fibonacci"), 'a', 16);
  const double na = static_cast<double>(std::count(w.begin(), w.end(), 'a'));
  const double nb = static_cast<double>(std::count(w.begin(), w.end(), 'b'));
  EXPECT_NEAR(na / nb, fixtures::kTau, 1e-3);
}

TEST(CutAndProject, MatchesSubstitution) {
  const auto sub = fixtures::fibonacci(13);
  const auto cp = apd::fibonacci_cut_and_project(sub.window().hi[0]);
  ASSERT_EQ(cp.size(), sub.size());
  for (std::size_t i = 0; i < cp.size(); ++i) EXPECT_EQ(cp.point(i), sub.point(i));
  for (const auto& g : cp.gap_values()) EXPECT_TRUE(g == q(1) || g == kTau);
  EXPECT_EQ(apd::classify_patches(cp, q(5, 2)).classes.size(), apd::classify_patches(sub, q(5, 2)).classes.size());
}

TEST(CutAndProject, ShiftedRangeKeepsClasses) {
  // A window that does not start at a substitution vertex.
  const auto cp = apd::cut_and_project_1d(kTau, q(-1), kTau - 1, q(-300), q(400));
  const auto sub = fixtures::fibonacci(14);
  for (const auto& r : {q(6, 5), q(5, 2), q(4)}) {
    EXPECT_EQ(apd::classify_patches(cp, r).classes, apd::classify_patches(sub, r).classes);
  }
}

TEST(CutAndProject, DegenerateWindowIsEmpty) {
  EXPECT_THROW(apd::cut_and_project_1d(kTau, q(0), q(0), q(0), q(50)), apd::PreconditionError);
  EXPECT_THROW(apd::cut_and_project_1d(q(2), q(0), q(1), q(0), q(50)), apd::PreconditionError);
}

TEST(CutAndProject, GapLabels) {
  const auto cp = apd::fibonacci_cut_and_project(q(60));
  const auto labelled = apd::with_gap_labels(cp, {{kTau, 'a'}, {q(1), 'b'}});
  EXPECT_EQ(labelled.tiles().substr(0, 8), "abaababa");
}

TEST(Product, SquareLattice) {
  const auto z = fixtures::integers(0, 4);
  const auto zz = apd::product_pattern(z, z);
  EXPECT_EQ(zz.dim(), 2);
  EXPECT_EQ(zz.size(), 25u);
  EXPECT_EQ(zz.r_min_sq(), q(1));
  EXPECT_TRUE(zz.find(ExactVector(q(3), q(2))).has_value());
}

TEST(Product, RminIsComponentMinimum) {
  const auto silver = apd::realize_points(apd::builtin_rule("silver"), "aabaab");
  const auto z = fixtures::integers(0, 3);
  const auto sq2 = apd::product_pattern(silver, z);
  EXPECT_EQ(sq2.r_min_sq(), q(1));
  const auto fib = fixtures::fibonacci(5);
  std::vector<ExactVector> pts;
  for (long i = 0; i <= 6; ++i) pts.emplace_back(q(i, 2));
  const apd::PatternSample halves(0, pts, apd::Box{ExactVector(q(0)), ExactVector(q(3))});
  const auto prod = apd::product_pattern(fib, halves);
  EXPECT_EQ(prod.r_min_sq(), std::min(fib.r_min_sq(), halves.r_min_sq()));
  EXPECT_EQ(prod.r_min_sq(), q(1, 4));
}

TEST(Product, MismatchedFieldsRejected) {
  const auto fib = fixtures::fibonacci(4);
  const auto silver = apd::realize_points(apd::builtin_rule("silver"), "aab");
  EXPECT_THROW(apd::product_pattern(fib, silver), apd::ArithmeticError);
}

TEST(Product, ClassCountIsProduct) {
  const auto fib = fixtures::fibonacci(8);
  const auto z = fixtures::integers(0, 40);
  const auto fz = apd::product_pattern(fib, z);
  for (const auto& r : {q(6, 5), q(5, 2)}) {
    const auto n1 = apd::classify_patches(fib, r).classes.size();
    const auto n2 = apd::classify_patches(z, r).classes.size();
    EXPECT_EQ(apd::classify_patches(fz, r).classes.size(), n1 * n2);
  }
  const auto ff = apd::product_pattern(fixtures::fibonacci(7), fixtures::fibonacci(7));
  const auto small = fixtures::fibonacci(7);
  const auto n = apd::classify_patches(small, q(5, 2)).classes.size();
  EXPECT_EQ(apd::classify_patches(ff, q(5, 2)).classes.size(), n * n);
}
