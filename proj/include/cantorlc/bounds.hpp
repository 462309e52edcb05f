#pragma once

// Closed-form bounds and constants, evaluated so that computed Lebesgue data
// can be compared with them.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/cantor.hpp"
#include "cantorlc/descriptor.hpp"
#include "cantorlc/error.hpp"
#include "cantorlc/julia.hpp"
#include "cantorlc/numerics.hpp"

namespace cantorlc {

enum class BoundSide { LowerBoundForLambda, UpperBoundForLambda, InequalityCheck };

inline std::string to_string(BoundSide s) {
  switch (s) {
    case BoundSide::LowerBoundForLambda:
      return "lower";
    case BoundSide::UpperBoundForLambda:
      return "upper";
    case BoundSide::InequalityCheck:
      return "check";
  }
  return "check";
}

/// One instance of an inequality lhs <= rhs.
struct InequalityRow {
  std::string label;
  int index = 0;
  BigReal lhs;
  BigReal rhs;
  /// (rhs - lhs) / rhs; negative when violated.
  double margin = 0.0;
  bool holds = true;
  /// lhs and rhs agree to working precision.
  bool equality = false;
};

struct BoundResult {
  using Parameters = std::vector<std::pair<std::string, std::string>>;

  BoundResult(std::string n, BigReal v, BoundSide sd, Parameters params)
      : name(std::move(n)), value(std::move(v)), side(sd), parameters(std::move(params)) {}

  std::string name;
  BigReal value;
  BoundSide side = BoundSide::InequalityCheck;
  Parameters parameters;
  // InequalityCheck only.
  bool pass = true;
  std::vector<InequalityRow> rows;
  std::string note;

  /// Whether a computed Lebesgue value is consistent with this bound.
  bool satisfied_by(const BigReal& computed) const {
    switch (side) {
      case BoundSide::LowerBoundForLambda:
        return computed >= value;
      case BoundSide::UpperBoundForLambda:
        return computed <= value;
      case BoundSide::InequalityCheck:
        return pass;
    }
    return false;
  }

  double worst_margin() const {
    double m = HUGE_VAL;
    for (const auto& r : rows) m = std::min(m, r.margin);
    return m;
  }
};

/// l_s ((1 - l_s) / (1 - l_1 + l_{s-1}))^(2^(s-1)), a lower bound for
/// |l_k(l_s)| with nodes Y_{s-1}.
inline BoundResult lemma_Y_bound(const SetDescriptor& d, int s, const PrecisionContext& ctx = {}) {
  if (!d.is_geometric()) throw DomainError("lemma_Y_bound needs a symmetric set");
  if (s < 3) throw DomainError("lemma_Y_bound needs s >= 3");
  const auto scope = ctx.scope();
  const BigReal ls = length<BigReal>(d, s);
  const BigReal ratio = (1 - ls) / (1 - length<BigReal>(d, 1) + length<BigReal>(d, s - 1));
  const BigReal log_value = log(ls) + BigReal(std::ldexp(1.0, s - 1)) * log(ratio);
  return {"lemma_Y", to_real({1, log_value}, ctx), BoundSide::LowerBoundForLambda,
          {{"set", d.canonical()}, {"s", std::to_string(s)}}};
}

/// beta^s (1 - beta^2)^(-2^(s-1)).
inline BoundResult theorem_beta_bound(const Rational& beta, int s, const PrecisionContext& ctx = {}) {
  if (beta <= 0 || beta > Rational(1, 3)) throw DomainError("beta must lie in (0, 1/3]");
  if (s < 3) throw DomainError("theorem_beta_bound needs s >= 3");
  const auto scope = ctx.scope();
  const BigReal b(beta);
  const BigReal log_value =
      static_cast<long>(s) * log(b) - BigReal(std::ldexp(1.0, s - 1)) * log(1 - b * b);
  return {"theorem_beta", to_real({1, log_value}, ctx), BoundSide::LowerBoundForLambda,
          {{"beta", to_string(beta)}, {"s", std::to_string(s)}}};
}

struct MergelyanValue {
  BigReal log_Ms;
  BigReal leading_term;
};

/// log M_s with M_s = 2^(2s+3) l_{s+2} / ((2^(s+1))! l_{s+1}^(2^(s+1))), and
/// the leading term 2^(s+1) (s+1) (log(1/beta) - log 2).
inline MergelyanValue mergelyan_Ms(const SetDescriptor& d, int s, const PrecisionContext& ctx = {}) {
  if (d.kind() != SetKind::GeometricBeta) throw DomainError("mergelyan_Ms needs a K_beta set");
  if (d.beta_value() >= Rational(1, 3)) throw DomainError("mergelyan_Ms needs beta < 1/3");
  if (s < 0 || s > 40) throw DomainError("mergelyan_Ms level out of range");
  const auto scope = ctx.scope();
  const BigReal n = BigReal(std::ldexp(1.0, s + 1));
  const BigReal log2v = BigReal::log2_const(ctx.bits);
  const BigReal log_inv_beta = -log(BigReal(d.beta_value()));
  const BigReal log_l_s1 = -static_cast<long>(s + 1) * log_inv_beta;
  const BigReal log_l_s2 = -static_cast<long>(s + 2) * log_inv_beta;
  BigReal log_ms = static_cast<long>(2 * s + 3) * log2v + log_l_s2 - lngamma(n + 1) - n * log_l_s1;
  BigReal lead = n * static_cast<long>(s + 1) * (log_inv_beta - log2v);
  return {std::move(log_ms), std::move(lead)};
}

/// Constant C_alpha and threshold n_alpha of the summation inequality.
inline std::pair<int, int> sum_constants(const Rational& alpha) {
  if (alpha >= 2) return {7, 4};
  const double a = alpha.get_d();
  const double v = std::log(std::log(12.0) / std::log(3.0)) / std::log(a);
  return {5, 3 + static_cast<int>(std::floor(v))};
}

namespace detail {

// log l_k and log h_k for K^alpha, k = 0..n_max+1.
inline std::pair<std::vector<BigReal>, std::vector<BigReal>> alpha_logs(const Rational& alpha, const Rational& ell1,
                                                                        int n_max) {
  const BigReal a(alpha);
  const BigReal log_l1 = log(BigReal(ell1));
  std::vector<BigReal> log_l;
  for (int k = 0; k <= n_max + 2; ++k)
    log_l.push_back(k == 0 ? BigReal(0) : BigReal(pow(a, static_cast<long>(k - 1)) * log_l1));
  std::vector<BigReal> log_h;
  for (int k = 0; k <= n_max + 1; ++k)
    log_h.push_back(log_l[k] + log1p(-2 * exp(log_l[k + 1] - log_l[k])));
  return {std::move(log_l), std::move(log_h)};
}

inline InequalityRow make_row(std::string label, int index, BigReal lhs, BigReal rhs, double tolerance) {
  InequalityRow r{std::move(label), index, std::move(lhs), std::move(rhs)};
  r.margin = ((r.rhs - r.lhs) / r.rhs).to_double();
  r.holds = r.margin >= -tolerance;
  r.equality = std::fabs(r.margin) <= tolerance;
  return r;
}

}  // namespace detail

/// A_n = 2^n h_n sum_{k=0}^n 1/(2^k h_k) against C_alpha for n <= n_max and
/// against 2 for n_alpha <= n <= n_max, on K^alpha. Evaluated in log domain.
inline BoundResult lemma_sum_check(const Rational& alpha, const Rational& ell1, int n_max,
                                   const PrecisionContext& ctx = {}) {
  const SetDescriptor d = SetDescriptor::alpha(alpha, ell1);
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  const auto scope = ctx.scope();
  const auto [c, n_alpha] = sum_constants(alpha);
  const auto [log_l, log_h] = detail::alpha_logs(alpha, ell1, n_max);
  const BigReal log2v = BigReal::log2_const(ctx.bits);
  BoundResult out{"lemma_sum", BigReal(c), BoundSide::InequalityCheck,
                  {{"set", d.canonical()}, {"n_max", std::to_string(n_max)}, {"C", std::to_string(c)},
                   {"n_alpha", std::to_string(n_alpha)}}};
  for (int n = 0; n <= n_max; ++n) {
    // Terms are ordered from smallest (k = 0) to largest (k = n).
    BigReal a_n(0);
    for (int k = 0; k <= n; ++k)
      a_n += exp(static_cast<long>(n - k) * log2v + log_h[static_cast<std::size_t>(n)] -
                 log_h[static_cast<std::size_t>(k)]);
    out.rows.push_back(detail::make_row("C", n, a_n, BigReal(c), 0.0));
    if (n >= n_alpha) out.rows.push_back(detail::make_row("2", n, a_n, BigReal(2), 0.0));
  }
  for (const auto& r : out.rows) out.pass = out.pass && r.holds;
  return out;
}

/// l_k / h_{k-1} <= (3^(alpha^(k-2)) - 2)^(-1) and
/// l_k / h_k <= 1 + 2 (3^(alpha^(k-1)) - 2)^(-1) for 2 <= k <= k_max.
/// Exact in rationals for integer alpha; otherwise in log domain with a
/// relative tolerance of 2^-(bits-16). Equality cases are flagged per row.
inline BoundResult lemma_llh_check(const Rational& alpha, const Rational& ell1, int k_max,
                                   const PrecisionContext& ctx = {}) {
  const SetDescriptor d = SetDescriptor::alpha(alpha, ell1);
  if (k_max < 2) throw DomainError("k_max must be at least 2");
  const auto scope = ctx.scope();
  BoundResult out{"lemma_llh", BigReal(0), BoundSide::InequalityCheck,
                  {{"set", d.canonical()}, {"k_max", std::to_string(k_max)}}};

  bool exact = d.alpha_is_integer();
  if (exact) {
    mpz_class e;
    mpz_pow_ui(e.get_mpz_t(), alpha.get_num_mpz_t(), static_cast<unsigned long>(k_max));
    exact = e <= (1UL << 16);
  }

  if (exact) {
    const unsigned long a = alpha.get_num().get_ui();
    auto ell = [&](int k) { return length<Rational>(d, k); };
    auto three_pow = [&](int k) {
      mpz_class e, v;
      mpz_ui_pow_ui(e.get_mpz_t(), a, static_cast<unsigned long>(k));
      mpz_ui_pow_ui(v.get_mpz_t(), 3, e.get_ui());
      return Rational(v);
    };
    for (int k = 2; k <= k_max; ++k) {
      const Rational h_prev = ell(k - 1) - 2 * ell(k);
      const Rational h_k = ell(k) - 2 * ell(k + 1);
      const Rational lhs1 = ell(k) / h_prev;
      const Rational rhs1 = 1 / (three_pow(k - 2) - 2);
      const Rational lhs2 = ell(k) / h_k;
      const Rational rhs2 = 1 + 2 / (three_pow(k - 1) - 2);
      for (auto [label, lhs, rhs] : {std::tuple{"l_k/h_(k-1)", lhs1, rhs1}, std::tuple{"l_k/h_k", lhs2, rhs2}}) {
        InequalityRow r{label, k, BigReal(Rational(lhs)), BigReal(Rational(rhs))};
        const Rational diff = rhs - lhs;
        r.margin = Rational(diff / rhs).get_d();
        r.holds = diff >= 0;
        r.equality = diff == 0;
        out.rows.push_back(std::move(r));
      }
    }
  } else {
    const double tol = std::ldexp(1.0, -(ctx.bits - 16));
    const auto [log_l, log_h] = detail::alpha_logs(alpha, ell1, k_max);
    const BigReal a(alpha);
    const BigReal log3 = log(BigReal(3));
    auto inv_three_pow_minus_two = [&](int k) {
      // (3^(a^k) - 2)^(-1) = 3^(-a^k) / (1 - 2 * 3^(-a^k)), as a logarithm.
      const BigReal t = -pow(a, static_cast<long>(k)) * log3;
      return t - log1p(-2 * exp(t));
    };
    for (int k = 2; k <= k_max; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const BigReal lhs1 = log_l[ku] - log_h[ku - 1];
      const BigReal rhs1 = inv_three_pow_minus_two(k - 2);
      const BigReal lhs2 = log_l[ku] - log_h[ku];
      const BigReal rhs2 = log1p(2 * exp(inv_three_pow_minus_two(k - 1)));
      out.rows.push_back(detail::make_row("l_k/h_(k-1)", k, exp(lhs1), exp(rhs1), tol));
      out.rows.push_back(detail::make_row("l_k/h_k", k, exp(lhs2), exp(rhs2), tol));
    }
  }
  for (const auto& r : out.rows) out.pass = out.pass && r.holds;
  std::size_t eq = 0;
  for (const auto& r : out.rows) eq += r.equality ? 1 : 0;
  if (eq) out.note = std::to_string(eq) + " row(s) hold with equality";
  return out;
}

/// 1 + 4 C_0 / 105, an upper bound for Lambda_{2^s}(Y_{s-1}, K(gamma)).
inline BoundResult bdd2_bound(const GammaSequence& g, const PrecisionContext& ctx = {}) {
  const auto scope = ctx.scope();
  return {"bdd2", 1 + 4 * c0_constant(g, ctx) / 105, BoundSide::UpperBoundForLambda, {{"gamma", g.canonical()}}};
}

/// (N - 2) / C_0, a lower bound for Lambda_N on K(gamma) when one node of
/// Y_{s-1} is removed.
inline BoundResult notbdd_bound(const GammaSequence& g, long n, const PrecisionContext& ctx = {}) {
  if (n < 3) throw DomainError("notbdd_bound needs N >= 3");
  const auto scope = ctx.scope();
  return {"notbdd", BigReal(n - 2) / c0_constant(g, ctx), BoundSide::LowerBoundForLambda,
          {{"gamma", g.canonical()}, {"N", std::to_string(n)}}};
}

}  // namespace cantorlc
