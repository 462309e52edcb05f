#pragma once

// Precision policy and sign/log products.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/descriptor.hpp"
#include "cantorlc/error.hpp"

namespace cantorlc {

inline constexpr int kFloorBits = 128;
inline constexpr int kGuardBits = 64;

/// Working precision for one computation: enough bits to resolve the
/// level-`level_budget` lengths of a set to `target_digits` decimal digits.
struct PrecisionContext {
  int bits = kFloorBits;
  int target_digits = 40;
  int level_budget = 0;

  /// Makes this context's precision the thread default until destruction.
  PrecisionScope scope() const { return PrecisionScope(bits); }
};

/// ceil(3.33 * digits), in integers.
inline long digit_bits(int digits) { return (333L * digits + 99) / 100; }

inline int ceil_log2(std::uint64_t n) {
  return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));
}

inline PrecisionContext make_context(const SetDescriptor& descriptor, int level_budget,
                                     std::uint64_t node_count, int target_digits) {
  if (level_budget < 0) throw DomainError("level budget must be nonnegative");
  if (node_count < 1) throw DomainError("node count must be positive");
  if (target_digits < 1) throw DomainError("target digits must be positive");
  const double inv = descriptor.log2_inverse_length(level_budget);
  if (!std::isfinite(inv) || inv > 1e9)
    throw BudgetError("level " + std::to_string(level_budget) + " needs an unreasonable precision (log2(1/l) = " +
                      std::to_string(inv) + ")");
  const long length_bits = static_cast<long>(std::ceil(inv - 1e-9));
  const long bits = length_bits + digit_bits(target_digits) + kGuardBits + ceil_log2(node_count);
  PrecisionContext ctx;
  ctx.bits = static_cast<int>(std::max<long>(kFloorBits, bits));
  ctx.target_digits = target_digits;
  ctx.level_budget = level_budget;
  return ctx;
}

/// sign * exp(log_abs); sign 0 stands for exact zero.
struct LogMagnitude {
  int sign = 1;
  BigReal log_abs = BigReal(0);

  static LogMagnitude zero() { return LogMagnitude{0, BigReal(0)}; }
  static LogMagnitude one() { return LogMagnitude{1, BigReal(0)}; }

  bool is_zero() const { return sign == 0; }

  friend LogMagnitude operator*(const LogMagnitude& a, const LogMagnitude& b) {
    if (a.sign == 0 || b.sign == 0) return zero();
    return LogMagnitude{a.sign * b.sign, a.log_abs + b.log_abs};
  }
  friend LogMagnitude operator/(const LogMagnitude& a, const LogMagnitude& b) {
    if (b.sign == 0) throw DomainError("division by an exact zero");
    if (a.sign == 0) return zero();
    return LogMagnitude{a.sign * b.sign, a.log_abs - b.log_abs};
  }

  /// log10 of the magnitude; -inf for zero.
  double log10_abs() const {
    if (sign == 0) return -HUGE_VAL;
    return log_abs.to_double() / std::log(10.0);
  }
};

inline LogMagnitude log_of(const BigReal& v) {
  if (v.is_zero()) return LogMagnitude::zero();
  return LogMagnitude{v.sign(), log(abs(v))};
}

inline LogMagnitude log_product(std::span<const BigReal> terms) {
  LogMagnitude acc = LogMagnitude::one();
  int sign = 1;
  bool zero = false;
  for (const auto& t : terms) {
    if (t.is_zero()) {
      zero = true;
      continue;
    }
    if (t.sign() < 0) sign = -sign;
    acc.log_abs += log(abs(t));
  }
  acc.sign = zero ? 0 : sign;
  return acc;
}

inline BigReal to_real(const LogMagnitude& m, const PrecisionContext& ctx) {
  if (m.sign == 0) return BigReal::zero(ctx.bits);
  BigReal v = exp(BigReal::with_bits(m.log_abs, std::max(ctx.bits, m.log_abs.bits())));
  v = BigReal::with_bits(v, ctx.bits);
  return m.sign < 0 ? -v : v;
}

}  // namespace cantorlc
