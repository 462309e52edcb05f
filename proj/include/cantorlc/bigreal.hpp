#pragma once

// Arbitrary-precision reals backed by MPFR, exact rationals backed by GMP.
//
// Every BigReal carries its own binary precision. Values created from
// integers, doubles, rationals or strings take the precision of the innermost
// PrecisionScope on the current thread (128 bits when none is active).
// Arithmetic on two BigReals rounds to the larger of the two precisions.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "cantorlc/error.hpp"

namespace cantorlc {

using Rational = mpq_class;

namespace detail {

inline thread_local int t_default_bits = 128;

// MPFR keeps the exponent range per thread. Lengths such as 3^(-3^19) need
// far more than the default range, so every thread widens it on first use.
inline void widen_exponent_range() {
  thread_local bool done = false;
  if (!done) {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    done = true;
  }
}

}  // namespace detail

inline constexpr int kMinBits = 2;

class BigReal {
 public:
  static int default_bits() {
    detail::widen_exponent_range();
    return detail::t_default_bits;
  }

  BigReal() : BigReal(0L) {}
  BigReal(int v) : BigReal(static_cast<long>(v)) {}
  BigReal(long v) {
    init(default_bits());
    mpfr_set_si(v_, v, MPFR_RNDN);
  }
  BigReal(unsigned long v) {
    init(default_bits());
    mpfr_set_ui(v_, v, MPFR_RNDN);
  }
  explicit BigReal(double v) {
    init(default_bits());
    mpfr_set_d(v_, v, MPFR_RNDN);
  }
  explicit BigReal(const Rational& q) {
    init(default_bits());
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  /// Exact-input conversion of "p/q", integers and decimal literals.
  explicit BigReal(std::string_view text);

  BigReal(const BigReal& o) {
    init(o.bits());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigReal(BigReal&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigReal& operator=(const BigReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, o.bits());
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigReal& operator=(BigReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigReal() { mpfr_clear(v_); }

  /// A copy of `v` rounded (or exactly extended) to `bits`.
  static BigReal with_bits(const BigReal& v, int bits) {
    BigReal r(Uninit{}, bits);
    mpfr_set(r.v_, v.v_, MPFR_RNDN);
    return r;
  }
  static BigReal zero(int bits) {
    BigReal r(Uninit{}, bits);
    mpfr_set_zero(r.v_, 1);
    return r;
  }

  int bits() const { return static_cast<int>(mpfr_get_prec(v_)); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  /// Scientific notation with `digits` significant decimal digits.
  std::string to_string(int digits) const;
  /// Enough digits to reproduce the value at its own precision.
  std::string to_string() const { return to_string(round_trip_digits(bits())); }
  static int round_trip_digits(int bits) { return 1 + (bits * 30103 + 99999) / 100000; }

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr raw() { return v_; }

  BigReal operator-() const {
    BigReal r(Uninit{}, bits());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  BigReal& operator+=(const BigReal& o) { return apply(o, mpfr_add); }
  BigReal& operator-=(const BigReal& o) { return apply(o, mpfr_sub); }
  BigReal& operator*=(const BigReal& o) { return apply(o, mpfr_mul); }
  BigReal& operator/=(const BigReal& o) { return apply(o, mpfr_div); }

  friend BigReal operator+(const BigReal& a, const BigReal& b) { return binary(a, b, mpfr_add); }
  friend BigReal operator-(const BigReal& a, const BigReal& b) { return binary(a, b, mpfr_sub); }
  friend BigReal operator*(const BigReal& a, const BigReal& b) { return binary(a, b, mpfr_mul); }
  friend BigReal operator/(const BigReal& a, const BigReal& b) { return binary(a, b, mpfr_div); }

  // Integer operands keep the precision of the BigReal operand.
  friend BigReal operator+(const BigReal& a, long b) { return a + with_prec(b, a.bits()); }
  friend BigReal operator+(long a, const BigReal& b) { return with_prec(a, b.bits()) + b; }
  friend BigReal operator-(const BigReal& a, long b) { return a - with_prec(b, a.bits()); }
  friend BigReal operator-(long a, const BigReal& b) { return with_prec(a, b.bits()) - b; }
  friend BigReal operator*(const BigReal& a, long b) { return a * with_prec(b, a.bits()); }
  friend BigReal operator*(long a, const BigReal& b) { return with_prec(a, b.bits()) * b; }
  friend BigReal operator/(const BigReal& a, long b) { return a / with_prec(b, a.bits()); }
  friend BigReal operator/(long a, const BigReal& b) { return with_prec(a, b.bits()) / b; }

  friend int compare(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.v_, b.v_); }
  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigReal& a, const BigReal& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const BigReal& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend bool operator<(const BigReal& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
  friend bool operator<=(const BigReal& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
  friend bool operator>(const BigReal& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
  friend bool operator>=(const BigReal& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }

  friend BigReal abs(const BigReal& a) { return unary(a, mpfr_abs); }
  friend BigReal sqrt(const BigReal& a) { return unary(a, mpfr_sqrt); }
  friend BigReal log(const BigReal& a) { return unary(a, mpfr_log); }
  friend BigReal log2(const BigReal& a) { return unary(a, mpfr_log2); }
  friend BigReal log10(const BigReal& a) { return unary(a, mpfr_log10); }
  friend BigReal log1p(const BigReal& a) { return unary(a, mpfr_log1p); }
  friend BigReal exp(const BigReal& a) { return unary(a, mpfr_exp); }
  friend BigReal expm1(const BigReal& a) { return unary(a, mpfr_expm1); }
  friend BigReal cos(const BigReal& a) { return unary(a, mpfr_cos); }
  friend BigReal lngamma(const BigReal& a) { return unary(a, mpfr_lngamma); }
  friend BigReal pow(const BigReal& a, const BigReal& b) { return binary(a, b, mpfr_pow); }
  friend BigReal pow(const BigReal& a, long e) {
    BigReal r(Uninit{}, a.bits());
    mpfr_pow_si(r.v_, a.v_, e, MPFR_RNDN);
    return r;
  }
  /// a * 2^e, exact.
  friend BigReal ldexp(const BigReal& a, long e) {
    BigReal r(Uninit{}, a.bits());
    mpfr_mul_2si(r.v_, a.v_, e, MPFR_RNDN);
    return r;
  }
  friend BigReal max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }
  friend BigReal min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }

  static BigReal pi(int bits) {
    BigReal r(Uninit{}, bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static BigReal log2_const(int bits) {
    BigReal r(Uninit{}, bits);
    mpfr_const_log2(r.v_, MPFR_RNDN);
    return r;
  }

  friend std::ostream& operator<<(std::ostream& os, const BigReal& v) { return os << v.to_string(); }

 private:
  struct Uninit {};
  BigReal(Uninit, int bits) { init(bits); }

  void init(int bits) { mpfr_init2(v_, std::max(bits, kMinBits)); }

  static BigReal with_prec(long v, int bits) {
    BigReal r(Uninit{}, bits);
    mpfr_set_si(r.v_, v, MPFR_RNDN);
    return r;
  }

  using BinaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  using UnaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

  static BigReal binary(const BigReal& a, const BigReal& b, BinaryFn fn) {
    BigReal r(Uninit{}, std::max(a.bits(), b.bits()));
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  static BigReal unary(const BigReal& a, UnaryFn fn) {
    BigReal r(Uninit{}, a.bits());
    fn(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  BigReal& apply(const BigReal& o, BinaryFn fn) {
    if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN);
    fn(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  mpfr_t v_;
};

/// Sets the default precision of BigReals created on this thread.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits) : saved_(BigReal::default_bits()) {
    if (bits < kMinBits) throw DomainError("precision must be at least 2 bits");
    detail::t_default_bits = bits;
  }
  ~PrecisionScope() { detail::t_default_bits = saved_; }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  int saved_;
};

/// Parses "p/q", signed integers, and decimal literals such as "1.5" or
/// "1e-6" into an exact rational. Throws DomainError on malformed input.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw DomainError("empty number");

  auto parse_decimal = [&](std::string_view s) -> Rational {
    std::string in(s);
    bool negative = false;
    std::size_t pos = 0;
    if (pos < in.size() && (in[pos] == '+' || in[pos] == '-')) negative = in[pos++] == '-';
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < in.size(); ++pos) {
      char c = in[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits.push_back(c);
        any_digit = true;
        if (seen_point) ++frac_digits;
      } else if (c == '.' && !seen_point) {
        seen_point = true;
      } else {
        break;
      }
    }
    if (!any_digit) throw DomainError("malformed number '" + std::string(text) + "'");
    long exponent = 0;
    if (pos < in.size() && (in[pos] == 'e' || in[pos] == 'E')) {
      ++pos;
      const std::string rest = in.substr(pos);
      char* end = nullptr;
      exponent = std::strtol(rest.c_str(), &end, 10);
      if (rest.empty() || *end != '\0') throw DomainError("malformed exponent in '" + std::string(text) + "'");
      pos = in.size();
    }
    if (pos != in.size()) throw DomainError("malformed number '" + std::string(text) + "'");
    exponent -= frac_digits;
    mpz_class mantissa(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational q = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  };

  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(trim(text.substr(0, slash)));
  const Rational den = parse_decimal(trim(text.substr(slash + 1)));
  if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  Rational q = num / den;
  q.canonicalize();
  return q;
}

/// Canonical "p/q" (or "p") spelling of a rational.
inline std::string to_string(const Rational& q) {
  Rational c(q);
  c.canonicalize();
  return c.get_str(10);
}

inline BigReal::BigReal(std::string_view text) : BigReal(parse_rational(text)) {}

inline std::string BigReal::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return sign() < 0 ? "-inf" : "inf";
  if (is_zero()) return "0";
  digits = std::max(digits, 2);
  mpfr_exp_t exp10 = 0;
  char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<std::size_t>(digits), v_, MPFR_RNDN);
  std::string mant(raw);
  mpfr_free_str(raw);
  std::string out;
  if (!mant.empty() && mant.front() == '-') {
    out.push_back('-');
    mant.erase(0, 1);
  }
  out.push_back(mant.front());
  out.push_back('.');
  out.append(mant.substr(1));
  out.push_back('e');
  out.append(std::to_string(static_cast<long>(exp10) - 1));
  return out;
}

}  // namespace cantorlc
