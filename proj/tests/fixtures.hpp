#ifndef APD_TESTS_FIXTURES_HPP
#define APD_TESTS_FIXTURES_HPP

// Shared samples and independent oracles for the test suites. The oracles
// avoid ExactScalar: Fibonacci points are kept as integer pairs (m, n)
// standing for m + n*tau.

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "apd/generators.hpp"

namespace fixtures {

inline const double kTau = (1.0 + std::sqrt(5.0)) / 2.0;

inline apd::PatternSample fibonacci(int k) {
  const auto rule = apd::builtin_rule("fibonacci");
  return apd::realize_points(rule, apd::substitution_fixed_word(rule, 'a', k));
}

inline apd::PatternSample integers(long lo, long hi) { return apd::integer_lattice(lo, hi); }

/// Fibonacci word by plain string rewriting.
inline std::string fibonacci_word(int k) {
  std::string w = "a";
  for (int i = 0; i < k; ++i) {
    std::string n;
    for (char c : w) n += (c == 'a') ? "ab" : "a";
    w = n;
  }
  return w;
}

using Pair = std::pair<long, long>;  // m + n*tau

inline std::vector<Pair> fibonacci_pairs(const std::string& word) {
  std::vector<Pair> out{{0, 0}};
  for (char c : word) {
    auto [m, n] = out.back();
    out.push_back(c == 'a' ? Pair{m, n + 1} : Pair{m + 1, n});
  }
  return out;
}

inline double value(const Pair& p) { return static_cast<double>(p.first) + static_cast<double>(p.second) * kTau; }

/// Number of distinct r-patches over points with [p - r, p + r] inside [0, L].
/// Radii must stay away from values m + n*tau so that doubles decide exactly.
inline std::size_t oracle_class_count(const std::string& word, double r) {
  const auto pts = fibonacci_pairs(word);
  const double total = value(pts.back());
  std::set<std::vector<Pair>> classes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = value(pts[i]);
    if (x - r < 0 || x + r > total) continue;
    std::vector<Pair> patch;
    for (const auto& q : pts) {
      Pair d{q.first - pts[i].first, q.second - pts[i].second};
      if (std::fabs(value(d)) < r) patch.push_back(d);
    }
    classes.insert(patch);
  }
  return classes.size();
}

}  // namespace fixtures

#endif  // APD_TESTS_FIXTURES_HPP
