#ifndef APD_GENERATORS_HPP
#define APD_GENERATORS_HPP

// Exact constructors of FLC point sets: 1D substitution tilings with natural
// tile lengths, 1D cut-and-project sets, and 2D products.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apd/error.hpp"
#include "apd/exactnum.hpp"
#include "apd/linalg.hpp"
#include "apd/patterns.hpp"

namespace apd {

struct SubstitutionRule {
  std::string name;
  std::string alphabet;                 // one character per letter
  std::map<char, std::string> images;
  long field = 0;                       // d of Q(sqrt d); 0 when all lengths are rational
  std::map<char, ExactScalar> lengths;  // natural lengths, shortest = 1
  ExactScalar lambda;                   // Perron-Frobenius eigenvalue

  std::size_t index(char c) const {
    auto pos = alphabet.find(c);
    if (pos == std::string::npos) throw ConfigError(std::string("letter '") + c + "' is not in the alphabet");
    return pos;
  }
  const ExactScalar& length(char c) const {
    auto it = lengths.find(c);
    if (it == lengths.end()) throw ConfigError(std::string("no length for letter '") + c + "'");
    return it->second;
  }
  /// M[i][j] = number of occurrences of letter i in the image of letter j.
  Matrix<Rational> matrix() const {
    Matrix<Rational> m(alphabet.size(), alphabet.size());
    for (std::size_t j = 0; j < alphabet.size(); ++j)
      for (char c : images.at(alphabet[j])) m(index(c), j) += 1;
    return m;
  }
};

namespace detail {

inline bool is_primitive(const Matrix<Rational>& m) {
  const std::size_t n = m.rows();
  std::vector<std::vector<bool>> pos(n, std::vector<bool>(n)), cur;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pos[i][j] = sgn(m(i, j)) > 0;
  cur = pos;
  const std::size_t bound = (n - 1) * (n - 1) + 1;  // Wielandt
  for (std::size_t step = 1; step <= bound; ++step) {
    bool all = true;
    for (const auto& row : cur)
      for (bool b : row) all = all && b;
    if (all) return true;
    std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (cur[i][k])
          for (std::size_t j = 0; j < n; ++j) next[i][j] = next[i][j] || pos[k][j];
    cur = std::move(next);
  }
  return false;
}

inline double perron_estimate(const Matrix<Rational>& m) {
  const std::size_t n = m.rows();
  std::vector<double> v(n, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i] += m(i, j).get_d() * v[j];
    double s = 0.0;
    for (double x : w) s += x;
    lambda = s / std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : w) x /= s;
    v = std::move(w);
  }
  return lambda;
}

inline Matrix<ExactScalar> shifted(const Matrix<Rational>& mt, const ExactScalar& lambda) {
  Matrix<ExactScalar> a(mt.rows(), mt.cols());
  for (std::size_t i = 0; i < mt.rows(); ++i)
    for (std::size_t j = 0; j < mt.cols(); ++j) a(i, j) = ExactScalar(Rational(mt(i, j)));
  for (std::size_t i = 0; i < mt.rows(); ++i) a(i, i) -= lambda;
  return a;
}

// The PF eigenvalue is an algebraic integer, so it is (p + q sqrt d)/2 with p, q integers.
inline ExactScalar exact_perron(const Matrix<Rational>& m, long d) {
  const double est = perron_estimate(m);
  const Matrix<Rational> mt = m.transposed();
  const double root = d > 0 ? std::sqrt(static_cast<double>(d)) : 0.0;
  const long qmax = d > 0 ? static_cast<long>(2.0 * est / root) + 2 : 0;
  for (long q = 0; q <= qmax; ++q) {
    const double pd = 2.0 * est - static_cast<double>(q) * root;
    for (long p = static_cast<long>(std::floor(pd)) - 1; p <= static_cast<long>(std::ceil(pd)) + 1; ++p) {
      ExactScalar lambda = q == 0 ? ExactScalar(make_rational(p, 2))
                                  : ExactScalar(make_rational(p, 2), make_rational(q, 2), d);
      if (std::fabs(lambda.to_double() - est) > 1e-6 * std::max(1.0, est)) continue;
      if (shifted(mt, lambda).rank() < m.rows()) return lambda;
    }
  }
  throw ConfigError("Perron-Frobenius eigenvalue " + std::to_string(est) + " is not in Q(sqrt " + std::to_string(d) + ")");
}

}  // namespace detail

/// Validates a rule and derives natural lengths when none are given.
inline SubstitutionRule make_rule(std::string name, std::string alphabet, std::map<char, std::string> images, long field,
                                  std::optional<std::map<char, ExactScalar>> lengths = std::nullopt) {
  SubstitutionRule rule;
  rule.name = std::move(name);
  rule.alphabet = std::move(alphabet);
  rule.images = std::move(images);
  rule.field = field;
  if (rule.alphabet.empty()) throw ConfigError("empty alphabet");
  for (std::size_t i = 0; i < rule.alphabet.size(); ++i) {
    if (rule.alphabet.find(rule.alphabet[i]) != i) throw ConfigError("repeated letter in alphabet");
    auto it = rule.images.find(rule.alphabet[i]);
    if (it == rule.images.end() || it->second.empty())
      throw ConfigError(std::string("letter '") + rule.alphabet[i] + "' has no image");
    for (char c : it->second) rule.index(c);
  }
  if (rule.images.size() != rule.alphabet.size()) throw ConfigError("image given for a letter outside the alphabet");
  if (field != 0 && !is_square_free(field)) throw ConfigError("d must be a square-free integer > 1");
  const auto m = rule.matrix();
  if (!detail::is_primitive(m)) throw ConfigError("substitution matrix is not primitive");

  if (lengths) {
    rule.lengths = *lengths;
    for (char c : rule.alphabet) {
      if (rule.length(c).sign() <= 0) throw ConfigError("tile lengths must be positive");
    }
    const char first = rule.alphabet[0];
    ExactScalar image_len;
    for (char c : rule.images.at(first)) image_len += rule.length(c);
    rule.lambda = image_len / rule.length(first);
    for (char l : rule.alphabet) {
      ExactScalar s;
      for (char c : rule.images.at(l)) s += rule.length(c);
      if (s != rule.lambda * rule.length(l))
        throw ConfigError(std::string("lengths are not a left eigenvector (letter '") + l + "')");
    }
    return rule;
  }

  rule.lambda = detail::exact_perron(m, field);
  const auto basis = detail::shifted(m.transposed(), rule.lambda).nullspace();
  if (basis.size() != 1) throw ConfigError("Perron-Frobenius eigenvalue is not simple");
  std::vector<ExactScalar> v = basis.front();
  if (v.front().sign() < 0)
    for (auto& x : v) x = -x;
  ExactScalar smallest = v.front();
  for (const auto& x : v) {
    if (x.sign() <= 0) throw ConfigError("eigenvector is not positive");
    smallest = min(smallest, x);
  }
  for (std::size_t i = 0; i < v.size(); ++i) rule.lengths[rule.alphabet[i]] = v[i] / smallest;
  return rule;
}

/// fibonacci, silver, period-doubling, periodic.
inline SubstitutionRule builtin_rule(const std::string& name) {
  if (name == "fibonacci") return make_rule(name, "ab", {{'a', "ab"}, {'b', "a"}}, 5);
  if (name == "silver") return make_rule(name, "ab", {{'a', "aab"}, {'b', "a"}}, 2);
  if (name == "period-doubling") return make_rule(name, "ab", {{'a', "ab"}, {'b', "aa"}}, 0);
  if (name == "periodic") return make_rule(name, "a", {{'a', "a"}}, 0);
  throw ConfigError("unknown built-in rule '" + name + "'");
}

/// The k-fold image of the seed letter.
inline std::string substitution_fixed_word(const SubstitutionRule& rule, char seed, int k) {
  rule.index(seed);
  if (k < 0) throw PreconditionError("iteration count must be non-negative");
  std::string word(1, seed);
  for (int i = 0; i < k; ++i) {
    std::string next;
    for (char c : word) next += rule.images.at(c);
    word = std::move(next);
  }
  return word;
}

/// Vertices of the tiling spelled by `word` starting at `origin`.
inline PatternSample realize_points(const SubstitutionRule& rule, const std::string& word,
                                    const ExactScalar& origin = ExactScalar()) {
  if (word.empty()) throw PreconditionError("cannot realize an empty word");
  std::vector<ExactVector> pts;
  pts.reserve(word.size() + 1);
  ExactScalar x = origin;
  pts.emplace_back(x);
  for (char c : word) {
    x += rule.length(c);
    pts.emplace_back(x);
  }
  return PatternSample(rule.field, std::move(pts), Box{ExactVector(origin), ExactVector(x)}, word);
}

/// Points m + n*omega in [x_lo, x_hi] whose conjugate m + n*omega' lies in [w_lo, w_hi).
inline PatternSample cut_and_project_1d(const ExactScalar& omega, const ExactScalar& w_lo, const ExactScalar& w_hi,
                                        const ExactScalar& x_lo, const ExactScalar& x_hi) {
  if (omega.is_rational()) throw PreconditionError("slope must be irrational");
  const ExactScalar omega_c = omega.conjugate();
  const double o = omega.to_double(), oc = omega_c.to_double();
  const double xl = x_lo.to_double(), xh = x_hi.to_double();
  const double wl = w_lo.to_double(), wh = w_hi.to_double();
  // x - x* = n (omega - omega'): bound n from both boxes.
  const double span = o - oc;
  const double n1 = (xl - wh) / span, n2 = (xh - wl) / span;
  const long n_lo = static_cast<long>(std::floor(std::min(n1, n2))) - 1;
  const long n_hi = static_cast<long>(std::ceil(std::max(n1, n2))) + 1;
  std::vector<ExactVector> pts;
  for (long n = n_lo; n <= n_hi; ++n) {
    const double base = static_cast<double>(n) * o;
    for (long m = static_cast<long>(std::floor(xl - base)) - 1; m <= static_cast<long>(std::ceil(xh - base)) + 1; ++m) {
      const ExactScalar x = ExactScalar(m) + ExactScalar(n) * omega;
      if (x < x_lo || x_hi < x) continue;
      const ExactScalar star = ExactScalar(m) + ExactScalar(n) * omega_c;
      if (star < w_lo || !(star < w_hi)) continue;
      pts.emplace_back(x);
    }
  }
  if (pts.empty()) throw PreconditionError("cut-and-project selection is empty");
  return PatternSample(omega.discriminant(), std::move(pts), Box{ExactVector(x_lo), ExactVector(x_hi)});
}

/// Fibonacci vertices in [0, x_hi]: slope tau, window [-1, tau - 1).
inline PatternSample fibonacci_cut_and_project(const ExactScalar& x_hi) {
  const ExactScalar tau = golden_ratio();
  return cut_and_project_1d(tau, ExactScalar(-1), tau - 1, ExactScalar(0), x_hi);
}

/// Copies a 1D sample and labels each tile by its exact length.
inline PatternSample with_gap_labels(const PatternSample& p, const std::map<ExactScalar, char, StructuralLess>& labels) {
  p.require_dim1("with_gap_labels");
  std::string tiles;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto it = labels.find(p.gap(i));
    if (it == labels.end()) throw PreconditionError("gap " + p.gap(i).str() + " has no label");
    tiles += it->second;
  }
  return PatternSample(p.field(), p.points(), p.window(), tiles);
}

/// Integer lattice points in [lo, hi], all tiles labelled 'a'.
inline PatternSample integer_lattice(long lo, long hi) {
  if (hi <= lo) throw PreconditionError("empty lattice range");
  std::vector<ExactVector> pts;
  for (long i = lo; i <= hi; ++i) pts.emplace_back(ExactScalar(i));
  return PatternSample(0, std::move(pts), Box{ExactVector(ExactScalar(lo)), ExactVector(ExactScalar(hi))},
                       std::string(static_cast<std::size_t>(hi - lo), 'a'));
}

/// {(p, q)} with the product window.
inline PatternSample product_pattern(const PatternSample& a, const PatternSample& b) {
  if (a.dim() != 1 || b.dim() != 1) throw PreconditionError("product needs two 1D samples");
  if (a.field() != 0 && b.field() != 0 && a.field() != b.field())
    throw ArithmeticError("product of samples over different quadratic fields");
  const long field = a.field() != 0 ? a.field() : b.field();
  std::vector<ExactVector> pts;
  pts.reserve(a.size() * b.size());
  for (const auto& p : a.points())
    for (const auto& q : b.points()) pts.emplace_back(p[0], q[0]);
  Box box{ExactVector(a.window().lo[0], b.window().lo[0]), ExactVector(a.window().hi[0], b.window().hi[0])};
  return PatternSample(field, std::move(pts), std::move(box));
}

}  // namespace apd

#endif  // APD_GENERATORS_HPP
