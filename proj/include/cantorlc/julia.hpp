#pragma once

// K(gamma): the Cantor sets cut out by the iterated quadratics
//   P_2(x) = x(x-1),  P_{2^{s+1}} = P_{2^s} (P_{2^s} + r_s),
// with r_0 = 1 and r_s = gamma_s r_{s-1}^2. Level s of the construction is
// E_s = { P_{2^{s+1}} <= 0 }, a union of 2^s disjoint closed intervals.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/cantor.hpp"
#include "cantorlc/descriptor.hpp"
#include "cantorlc/error.hpp"
#include "cantorlc/numerics.hpp"

namespace cantorlc {

namespace detail {

template <class T>
T gamma_value(const GammaSequence& g, int k) {
  return from_rational<T>(g.gamma(k));
}

}  // namespace detail

/// r_0, ..., r_s.
template <class T = BigReal>
std::vector<T> r_sequence(const GammaSequence& g, int s) {
  std::vector<T> r;
  r.reserve(static_cast<std::size_t>(s) + 1);
  r.push_back(detail::from_rational<T>(Rational(1)));
  for (int k = 1; k <= s; ++k) r.push_back(detail::gamma_value<T>(g, k) * r.back() * r.back());
  return r;
}

/// delta_s = gamma_1 ... gamma_s.
template <class T = BigReal>
T delta(const GammaSequence& g, int s) {
  T d = detail::from_rational<T>(Rational(1));
  for (int k = 1; k <= s; ++k) d *= detail::gamma_value<T>(g, k);
  return d;
}

/// P_{2^s}(x) and its derivative, s >= 1.
template <class T = BigReal>
std::pair<T, T> eval_P(const GammaSequence& g, int s, const T& x) {
  if (s < 1) throw DomainError("eval_P needs s >= 1");
  T p = x * x - x;
  T dp = 2 * x - 1;
  T r = detail::from_rational<T>(Rational(1));
  for (int k = 1; k < s; ++k) {
    r = detail::gamma_value<T>(g, k) * r * r;
    T next_dp = dp * (2 * p + r);
    p = p * (p + r);
    dp = std::move(next_dp);
  }
  return {std::move(p), std::move(dp)};
}

/// C_0 = exp(16 * sum gamma_k), with gamma_k = 0 beyond a finite table.
inline BigReal c0_constant(const GammaSequence& g, const PrecisionContext& ctx) {
  const auto scope = ctx.scope();
  return exp(16 * BigReal(g.total_sum()));
}

struct JuliaLevelData {
  int s = 0;
  BigReal r;
  BigReal delta;
  std::vector<BasicInterval<BigReal>> intervals;

  BigReal length(std::size_t j) const { return intervals[j].right - intervals[j].left; }
};

struct JuliaConstruction {
  GammaSequence gamma;
  PrecisionContext ctx;
  std::vector<JuliaLevelData> levels;

  int max_level() const { return static_cast<int>(levels.size()) - 1; }
  const JuliaLevelData& level(int s) const { return levels.at(static_cast<std::size_t>(s)); }
};

namespace detail {

// All x with P_{2^k}(x) = c, appended to out. Each step solves
// y^2 + r y - c = 0 and recurses; the small root is taken from the product of
// the roots so that it never suffers cancellation.
inline void preimages(const std::vector<BigReal>& r, int k, const BigReal& c, std::vector<BigReal>& out) {
  if (k == 1) {
    const BigReal disc = 1 + 4 * c;
    if (disc <= 0) throw DomainError("non-positive discriminant while solving P_2(x) = c; gamma is invalid");
    const BigReal big = (1 + sqrt(disc)) / 2;
    out.push_back(-c / big);
    out.push_back(big);
    return;
  }
  const BigReal& rk = r[static_cast<std::size_t>(k - 1)];
  const BigReal disc = rk * rk + 4 * c;
  if (disc <= 0) throw DomainError("non-positive discriminant in the preimage recursion; gamma is invalid");
  const BigReal big = (-rk - sqrt(disc)) / 2;
  const BigReal small = c.is_zero() ? BigReal::zero(big.bits()) : BigReal(-c / big);
  preimages(r, k - 1, big, out);
  preimages(r, k - 1, small, out);
}

}  // namespace detail

/// Levels 0..s_max of the construction at the precision of ctx.
inline JuliaConstruction build_levels(const GammaSequence& g, int s_max, const PrecisionContext& ctx) {
  if (s_max < 0) throw DomainError("s_max must be nonnegative");
  if (s_max > 24) throw BudgetError("K(gamma) levels beyond 24 are not supported");
  if (auto last = g.last_index(); last && s_max > *last)
    throw BudgetError("level " + std::to_string(s_max) + " needs gamma_" + std::to_string(s_max) +
                      ", beyond the table");
  const auto scope = ctx.scope();
  JuliaConstruction out{g, ctx, {}};
  const auto r = r_sequence<BigReal>(g, s_max);
  BigReal d(1);
  for (int s = 0; s <= s_max; ++s) {
    if (s > 0) d *= BigReal(g.gamma(s));
    JuliaLevelData level{s, r[static_cast<std::size_t>(s)], d, {}};
    std::vector<BigReal> ends;
    if (s == 0) {
      ends = {BigReal(0), BigReal(1)};
    } else {
      ends.reserve(std::size_t{2} << s);
      detail::preimages(r, s, BigReal(0), ends);
      detail::preimages(r, s, -r[static_cast<std::size_t>(s)], ends);
      std::sort(ends.begin(), ends.end(), [](const BigReal& a, const BigReal& b) { return a < b; });
    }
    level.intervals.reserve(ends.size() / 2);
    for (std::size_t j = 0; j < ends.size(); j += 2)
      level.intervals.push_back({{s, j / 2 + 1}, ends[j], ends[j + 1]});
    out.levels.push_back(std::move(level));
  }
  return out;
}

struct CheckEntry {
  std::string name;
  int level = 0;
  bool pass = true;
  /// Smallest relative slack seen; negative means violated.
  double worst_margin = HUGE_VAL;
  long checked = 0;
};

struct JuliaReport {
  std::vector<CheckEntry> entries;

  bool all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.pass; });
  }
};

namespace detail {

class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, int level) {
    entry_.name = std::move(name);
    entry_.level = level;
  }

  // Records lhs < rhs (strict) or lhs <= rhs, with relative slack
  // (rhs - lhs) / |rhs| as the margin. `tolerance` admits near-equalities.
  void less(const BigReal& lhs, const BigReal& rhs, bool strict, double tolerance = 0.0) {
    ++entry_.checked;
    const BigReal diff = rhs - lhs;
    double margin = 0.0;
    if (!diff.is_zero()) {
      const BigReal rel = diff / max(abs(rhs), abs(lhs));
      margin = rel.to_double();
    }
    const bool ok = strict ? (margin > 0 || (tolerance > 0 && margin > -tolerance))
                           : margin >= -tolerance;
    if (!ok) entry_.pass = false;
    entry_.worst_margin = std::min(entry_.worst_margin, margin);
  }

  void flag(bool ok, double margin) {
    ++entry_.checked;
    if (!ok) entry_.pass = false;
    entry_.worst_margin = std::min(entry_.worst_margin, margin);
  }

  CheckEntry done() && { return std::move(entry_); }

 private:
  CheckEntry entry_;
};

inline std::vector<double> chebyshev_positions(int m) {
  std::vector<double> t;
  const double pi = std::acos(-1.0);
  for (int i = 1; i <= m; ++i) t.push_back((1.0 - std::cos((2.0 * i - 1.0) * pi / (2.0 * m))) / 2.0);
  return t;
}

}  // namespace detail

/// Checks the length and separation bounds exactly on the interval data, and
/// the value and derivative bounds at endpoints plus `samples` Chebyshev
/// points per interval. The value and derivative bounds hold with equality
/// at endpoints, whose absolute accuracy is 2^-bits; at level s they are
/// admitted up to a relative 2^-(bits - 32 - log2(1/delta_s)).
inline JuliaReport verify_julia_invariants(const JuliaConstruction& c, int samples = 8) {
  JuliaReport report;
  if (c.levels.empty()) return report;
  const auto scope = c.ctx.scope();
  const int bits = c.ctx.bits;
  const BigReal residual_limit = BigReal::with_bits(BigReal(1), bits) / pow(BigReal(2), static_cast<long>(bits - 32));
  const BigReal c0 = c0_constant(c.gamma, c.ctx);
  const auto t = detail::chebyshev_positions(samples);
  const int s_max = c.max_level();

  for (int s = 0; s <= s_max; ++s) {
    const auto& lv = c.level(s);
    const auto n = lv.intervals.size();

    if (s >= 1) {
      detail::CheckAccumulator eq9("length-bounds", s);
      for (std::size_t j = 0; j < n; ++j) {
        const BigReal len = lv.length(j);
        eq9.less(lv.delta, len, true);
        eq9.less(len, c0 * lv.delta, true);
      }
      report.entries.push_back(std::move(eq9).done());
    }

    if (s < s_max) {
      const auto& next = c.level(s + 1);
      const BigReal g4 = 4 * BigReal(c.gamma.gamma(s + 1));
      detail::CheckAccumulator eq10("child-length", s);
      detail::CheckAccumulator eq11("gap-width", s);
      detail::CheckAccumulator nest("nesting", s);
      for (std::size_t j = 0; j < n; ++j) {
        const BigReal len = lv.length(j);
        const auto& a = next.intervals[2 * j];
        const auto& b = next.intervals[2 * j + 1];
        eq10.less(a.right - a.left, g4 * len, true);
        eq10.less(b.right - b.left, g4 * len, true);
        eq11.less((1 - g4) * len, b.left - a.right, true);
        nest.flag(lv.intervals[j].left <= a.left && a.right < b.left && b.right <= lv.intervals[j].right, 0.0);
      }
      report.entries.push_back(std::move(eq10).done());
      report.entries.push_back(std::move(eq11).done());
      report.entries.push_back(std::move(nest).done());
    }

    detail::CheckAccumulator residual("endpoint-residual", s);
    detail::CheckAccumulator sign("sign-structure", s);
    for (std::size_t j = 0; j < n; ++j) {
      for (const BigReal* e : {&lv.intervals[j].left, &lv.intervals[j].right}) {
        const BigReal v = abs(eval_P(c.gamma, s + 1, *e).first);
        residual.flag(v < residual_limit, v.is_zero() ? 1.0 : 1.0 - (v / residual_limit).to_double());
      }
      const BigReal len = lv.length(j);
      for (double tk : t) {
        const BigReal x = lv.intervals[j].left + BigReal(tk) * len;
        const BigReal v = eval_P(c.gamma, s + 1, x).first;
        sign.flag(v <= residual_limit, 0.0);
      }
      if (j + 1 < n) {
        const BigReal mid = (lv.intervals[j].right + lv.intervals[j + 1].left) / 2;
        sign.flag(eval_P(c.gamma, s + 1, mid).first > 0, 0.0);
      }
    }
    report.entries.push_back(std::move(residual).done());
    report.entries.push_back(std::move(sign).done());

    if (s >= 1) {
      const double resolved = std::ceil(SetDescriptor::julia(c.gamma).log2_inverse_length(s));
      const double slack = std::ldexp(1.0, -(bits - 32 - static_cast<int>(resolved)));
      detail::CheckAccumulator eq7("value-bound", s);
      detail::CheckAccumulator deriv_lo("derivative-lower", s);
      detail::CheckAccumulator deriv_hi("derivative-upper", s);
      detail::CheckAccumulator convex("derivative-sign", s);
      const BigReal upper = lv.r / lv.delta;
      const BigReal lower = upper / c0;
      for (std::size_t j = 0; j < n; ++j) {
        const BigReal len = lv.length(j);
        std::vector<BigReal> xs{lv.intervals[j].left, lv.intervals[j].right};
        for (double tk : t) xs.push_back(lv.intervals[j].left + BigReal(tk) * len);
        int first_sign = 0;
        bool same = true;
        for (const auto& x : xs) {
          const auto [p, dp] = eval_P(c.gamma, s, x);
          eq7.less(abs(p), lv.r, false, slack);
          deriv_lo.less(lower, abs(dp), true);
          deriv_hi.less(abs(dp), upper, false, slack);
          if (first_sign == 0) first_sign = dp.sign();
          same = same && dp.sign() == first_sign && first_sign != 0;
        }
        convex.flag(same, 0.0);
      }
      report.entries.push_back(std::move(eq7).done());
      report.entries.push_back(std::move(deriv_lo).done());
      report.entries.push_back(std::move(deriv_hi).done());
      report.entries.push_back(std::move(convex).done());
    }
  }
  return report;
}

}  // namespace cantorlc
