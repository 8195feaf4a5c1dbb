#ifndef APD_EXACTNUM_HPP
#define APD_EXACTNUM_HPP

// Exact arithmetic in a real quadratic field Q(sqrt d), and short vectors over it.
//
// A scalar is a + b*sqrt(d) with arbitrary-precision rationals a, b. Every
// scalar carries its discriminant d; d == 0 tags a plain rational, which
// combines with any field. Combining two scalars from different fields throws.

#include <gmpxx.h>
#include <mpfr.h>

#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "apd/error.hpp"

namespace apd {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw ArithmeticError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Exact conversion of a finite double.
inline Rational rational_from_double(double x) { return Rational(x); }

inline bool is_square_free(long d) {
  if (d <= 0) return false;
  for (long p = 2; p * p <= d; ++p) {
    if (d % (p * p) == 0) return false;
  }
  return true;
}

namespace detail {

inline void skip_spaces(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

// Unsigned decimal number "123", "1.25", or "2/3" style components are
// handled by the caller; this reads digits with an optional fractional part.
inline bool read_decimal(std::string_view s, std::size_t& pos, Rational& out) {
  std::size_t start = pos;
  mpz_class num = 0;
  mpz_class den = 1;
  bool any = false;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    num = num * 10 + (s[pos] - '0');
    ++pos;
    any = true;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      num = num * 10 + (s[pos] - '0');
      den *= 10;
      ++pos;
      any = true;
    }
  }
  if (!any) {
    pos = start;
    return false;
  }
  out = Rational(num, den);
  out.canonicalize();
  return true;
}

}  // namespace detail

/// Parses "3", "-7/4", "1.25". Throws ConfigError on anything else.
inline Rational parse_rational(std::string_view s) {
  std::size_t pos = 0;
  detail::skip_spaces(s, pos);
  bool neg = false;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
    neg = s[pos] == '-';
    ++pos;
  }
  Rational q;
  if (!detail::read_decimal(s, pos, q)) throw ConfigError("expected a rational, got '" + std::string(s) + "'");
  detail::skip_spaces(s, pos);
  if (pos < s.size() && s[pos] == '/') {
    ++pos;
    detail::skip_spaces(s, pos);
    Rational den;
    if (!detail::read_decimal(s, pos, den) || den == 0)
      throw ConfigError("bad denominator in '" + std::string(s) + "'");
    q /= den;
  }
  detail::skip_spaces(s, pos);
  if (pos != s.size()) throw ConfigError("trailing characters in rational '" + std::string(s) + "'");
  return neg ? Rational(-q) : q;
}

class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(long a) : a_(a) {}  // NOLINT: integers embed implicitly
  ExactScalar(Rational a) : a_(std::move(a)) { a_.canonicalize(); }  // NOLINT
  ExactScalar(Rational a, Rational b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (d_ < 0 || (d_ > 0 && !is_square_free(d_)))
      throw ArithmeticError("discriminant must be a positive square-free integer, got " + std::to_string(d_));
    if (d_ == 0 && b_ != 0) throw ArithmeticError("irrational part without a discriminant");
    a_.canonicalize();
    b_.canonicalize();
    normalize();
  }

  /// sqrt(d) as an element of Q(sqrt d).
  static ExactScalar sqrt_of(long d) { return ExactScalar(Rational(0), Rational(1), d); }

  const Rational& rational_part() const { return a_; }
  const Rational& irrational_part() const { return b_; }
  long discriminant() const { return d_; }
  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  /// Exact sign of a + b*sqrt(d).
  int sign() const {
    const int sa = sgn(a_);
    const int sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // Opposite signs: compare a^2 against b^2 d.
    const Rational lhs = a_ * a_;
    const Rational rhs = b_ * b_ * d_;
    const int c = cmp(lhs, rhs);
    if (c > 0) return sa;
    if (c < 0) return sb;
    return 0;
  }

  /// Nearest double (non-authoritative; exact decisions never use it).
  double to_double() const {
    if (b_ == 0) return a_.get_d();
    mpfr_t x, t, s;
    mpfr_inits2(256, x, t, s, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_si(s, d_, MPFR_RNDN);
    mpfr_sqrt(s, s, MPFR_RNDN);
    mpfr_mul_q(t, s, b_.get_mpq_t(), MPFR_RNDN);
    if (sgn(a_) * sgn(b_) >= 0) {
      mpfr_add_q(x, t, a_.get_mpq_t(), MPFR_RNDN);
    } else {
      // a + b sqrt d = (a^2 - b^2 d) / (a - b sqrt d), the denominator has no cancellation.
      const Rational norm = a_ * a_ - b_ * b_ * d_;
      mpfr_neg(t, t, MPFR_RNDN);
      mpfr_add_q(t, t, a_.get_mpq_t(), MPFR_RNDN);
      mpfr_set_q(x, norm.get_mpq_t(), MPFR_RNDN);
      mpfr_div(x, x, t, MPFR_RNDN);
    }
    const double out = mpfr_get_d(x, MPFR_RNDN);
    mpfr_clears(x, t, s, static_cast<mpfr_ptr>(nullptr));
    return out;
  }

  ExactScalar conjugate() const { return make(a_, -b_, d_); }

  /// Field norm a^2 - b^2 d.
  Rational norm() const { return a_ * a_ - b_ * b_ * d_; }

  ExactScalar inverse() const {
    if (is_zero()) throw ArithmeticError("division by zero");
    const Rational n = norm();
    return make(a_ / n, -b_ / n, d_);
  }

  ExactScalar abs() const { return sign() < 0 ? -*this : *this; }

  ExactScalar operator-() const { return make(-a_, -b_, d_); }

  friend ExactScalar operator+(const ExactScalar& x, const ExactScalar& y) {
    return make(x.a_ + y.a_, x.b_ + y.b_, common_d(x, y));
  }
  friend ExactScalar operator-(const ExactScalar& x, const ExactScalar& y) {
    return make(x.a_ - y.a_, x.b_ - y.b_, common_d(x, y));
  }
  friend ExactScalar operator*(const ExactScalar& x, const ExactScalar& y) {
    const long d = common_d(x, y);
    if (x.b_ == 0) return make(x.a_ * y.a_, x.a_ * y.b_, d);
    if (y.b_ == 0) return make(x.a_ * y.a_, x.b_ * y.a_, d);
    return make(x.a_ * y.a_ + x.b_ * y.b_ * d, x.a_ * y.b_ + x.b_ * y.a_, d);
  }
  friend ExactScalar operator/(const ExactScalar& x, const ExactScalar& y) {
    common_d(x, y);
    if (y.is_zero()) throw ArithmeticError("division by zero");
    if (y.b_ == 0) return make(x.a_ / y.a_, x.b_ / y.a_, x.d_);
    return x * y.inverse();
  }
  ExactScalar& operator+=(const ExactScalar& y) { return *this = *this + y; }
  ExactScalar& operator-=(const ExactScalar& y) { return *this = *this - y; }
  ExactScalar& operator*=(const ExactScalar& y) { return *this = *this * y; }
  ExactScalar& operator/=(const ExactScalar& y) { return *this = *this / y; }

  friend bool operator==(const ExactScalar& x, const ExactScalar& y) {
    common_d(x, y);
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend std::strong_ordering operator<=>(const ExactScalar& x, const ExactScalar& y) {
    const int s = (x - y).sign();
    return s < 0 ? std::strong_ordering::less
                 : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Cheap total order on the representation; agrees with == but not with <.
  friend int structural_compare(const ExactScalar& x, const ExactScalar& y) {
    if (int c = cmp(x.a_, y.a_); c != 0) return c < 0 ? -1 : 1;
    if (int c = cmp(x.b_, y.b_); c != 0) return c < 0 ? -1 : 1;
    return 0;
  }

  /// Canonical text: "a", "a+b*sqrt(d)", "a-b*sqrt(d)" or "b*sqrt(d)".
  std::string str() const {
    if (b_ == 0) return a_.get_str();
    std::string out;
    if (a_ != 0) out = a_.get_str();
    if (b_ > 0) {
      if (!out.empty()) out += '+';
      out += b_.get_str();
    } else {
      out += '-';
      out += Rational(-b_).get_str();
    }
    out += "*sqrt(" + std::to_string(d_) + ")";
    return out;
  }

  /// Parses sums of terms such as "1/2+1/2*sqrt(5)", "-3+2*sqrt(5)", "sqrt(2)/2", "1.25".
  /// `field` fixes the discriminant of the result when nonzero.
  static ExactScalar parse(std::string_view text, long field = 0) {
    const std::string s = strip(text);
    if (s.empty()) throw ConfigError("empty exact scalar");
    std::size_t pos = 0;
    Rational a = 0, b = 0;
    long d = 0;
    bool first = true;
    while (pos < s.size()) {
      int term_sign = 1;
      if (s[pos] == '+' || s[pos] == '-') {
        term_sign = s[pos] == '-' ? -1 : 1;
        ++pos;
      } else if (!first) {
        throw ConfigError("expected '+' or '-' in '" + s + "'");
      }
      first = false;
      Rational coef = term_sign;
      long term_d = 0;
      bool need_factor = true;
      while (true) {
        if (need_factor) {
          if (s.compare(pos, 5, "sqrt(") == 0) {
            pos += 5;
            std::size_t close = s.find(')', pos);
            if (close == std::string::npos) throw ConfigError("unclosed sqrt( in '" + s + "'");
            long dd = 0;
            try {
              dd = std::stol(s.substr(pos, close - pos));
            } catch (const std::exception&) {
              throw ConfigError("bad sqrt argument in '" + s + "'");
            }
            if (term_d != 0) throw ConfigError("repeated sqrt factor in '" + s + "'");
            if (!is_square_free(dd)) throw ConfigError("sqrt argument must be square-free in '" + s + "'");
            term_d = dd;
            pos = close + 1;
          } else {
            Rational q;
            if (!detail::read_decimal(s, pos, q)) throw ConfigError("expected a number in '" + s + "'");
            coef *= q;
          }
          need_factor = false;
          continue;
        }
        if (pos < s.size() && s[pos] == '*') {
          ++pos;
          need_factor = true;
          continue;
        }
        if (pos < s.size() && s[pos] == '/') {
          ++pos;
          Rational q;
          if (!detail::read_decimal(s, pos, q) || q == 0) throw ConfigError("bad divisor in '" + s + "'");
          coef /= q;
          continue;
        }
        break;
      }
      if (term_d == 0 || term_d == 1) {
        a += coef;
      } else {
        if (d != 0 && d != term_d) throw ConfigError("mixed discriminants in '" + s + "'");
        d = term_d;
        b += coef;
      }
    }
    if (field != 0) {
      if (d != 0 && d != field)
        throw ConfigError("scalar '" + s + "' is not in Q(sqrt " + std::to_string(field) + ")");
      d = field;
    }
    return ExactScalar(a, b, d);
  }

 private:
  static ExactScalar make(Rational a, Rational b, long d) {
    ExactScalar x;
    x.a_ = std::move(a);
    x.b_ = std::move(b);
    x.d_ = d;
    x.normalize();
    return x;
  }

  void normalize() {
    if (d_ == 1) {
      a_ += b_;
      b_ = 0;
    }
  }

  static long common_d(const ExactScalar& x, const ExactScalar& y) {
    if (x.d_ == y.d_) return x.d_;
    if (x.d_ == 0) return y.d_;
    if (y.d_ == 0) return x.d_;
    throw ArithmeticError("discriminant mismatch: " + std::to_string(x.d_) + " vs " + std::to_string(y.d_));
  }

  static std::string strip(std::string_view text) {
    std::string s;
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    return s;
  }

  Rational a_ = 0;
  Rational b_ = 0;
  long d_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const ExactScalar& x) { return os << x.str(); }

inline ExactScalar min(const ExactScalar& x, const ExactScalar& y) { return y < x ? y : x; }
inline ExactScalar max(const ExactScalar& x, const ExactScalar& y) { return x < y ? y : x; }

/// Golden ratio (1 + sqrt 5) / 2.
inline ExactScalar golden_ratio() { return ExactScalar(make_rational(1, 2), make_rational(1, 2), 5); }

/// Coordinates in R^1 or R^2 over one quadratic field.
class ExactVector {
 public:
  ExactVector() = default;
  explicit ExactVector(ExactScalar x) : c_{std::move(x), ExactScalar()}, dim_(1) {}
  ExactVector(ExactScalar x, ExactScalar y) : c_{std::move(x), std::move(y)}, dim_(2) {}

  int dim() const { return dim_; }
  const ExactScalar& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  ExactScalar& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  static ExactVector zero(int dim) { return dim == 1 ? ExactVector(ExactScalar()) : ExactVector(0, 0); }

  ExactScalar norm_sq() const {
    ExactScalar s = c_[0] * c_[0];
    if (dim_ == 2) s += c_[1] * c_[1];
    return s;
  }
  bool is_zero() const { return c_[0].is_zero() && (dim_ < 2 || c_[1].is_zero()); }

  std::array<double, 2> to_double() const {
    return {c_[0].to_double(), dim_ == 2 ? c_[1].to_double() : 0.0};
  }

  friend ExactVector operator+(const ExactVector& u, const ExactVector& v) {
    check_dims(u, v);
    return u.dim_ == 1 ? ExactVector(u.c_[0] + v.c_[0]) : ExactVector(u.c_[0] + v.c_[0], u.c_[1] + v.c_[1]);
  }
  friend ExactVector operator-(const ExactVector& u, const ExactVector& v) {
    check_dims(u, v);
    return u.dim_ == 1 ? ExactVector(u.c_[0] - v.c_[0]) : ExactVector(u.c_[0] - v.c_[0], u.c_[1] - v.c_[1]);
  }
  ExactVector operator-() const { return dim_ == 1 ? ExactVector(-c_[0]) : ExactVector(-c_[0], -c_[1]); }
  friend ExactVector operator*(const ExactScalar& s, const ExactVector& v) {
    return v.dim_ == 1 ? ExactVector(s * v.c_[0]) : ExactVector(s * v.c_[0], s * v.c_[1]);
  }

  friend bool operator==(const ExactVector& u, const ExactVector& v) {
    return u.dim_ == v.dim_ && u.c_[0] == v.c_[0] && (u.dim_ < 2 || u.c_[1] == v.c_[1]);
  }
  /// Lexicographic by value.
  friend std::strong_ordering operator<=>(const ExactVector& u, const ExactVector& v) {
    check_dims(u, v);
    if (auto c = u.c_[0] <=> v.c_[0]; c != 0 || u.dim_ == 1) return c;
    return u.c_[1] <=> v.c_[1];
  }
  friend int structural_compare(const ExactVector& u, const ExactVector& v) {
    if (u.dim_ != v.dim_) return u.dim_ < v.dim_ ? -1 : 1;
    if (int c = structural_compare(u.c_[0], v.c_[0]); c != 0 || u.dim_ == 1) return c;
    return structural_compare(u.c_[1], v.c_[1]);
  }

  std::string str() const { return dim_ == 1 ? c_[0].str() : "(" + c_[0].str() + ", " + c_[1].str() + ")"; }

 private:
  static void check_dims(const ExactVector& u, const ExactVector& v) {
    if (u.dim_ != v.dim_) throw PreconditionError("vector dimension mismatch");
  }

  std::array<ExactScalar, 2> c_{};
  int dim_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const ExactVector& v) { return os << v.str(); }

/// Representation order, for map keys.
struct StructuralLess {
  bool operator()(const ExactScalar& x, const ExactScalar& y) const { return structural_compare(x, y) < 0; }
  bool operator()(const ExactVector& u, const ExactVector& v) const { return structural_compare(u, v) < 0; }
  bool operator()(const std::vector<ExactVector>& u, const std::vector<ExactVector>& v) const {
    const std::size_t n = std::min(u.size(), v.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (int c = structural_compare(u[i], v[i]); c != 0) return c < 0;
    }
    return u.size() < v.size();
  }
};

}  // namespace apd

#endif  // APD_EXACTNUM_HPP
