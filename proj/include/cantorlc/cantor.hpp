#pragma once

// Geometrically symmetric Cantor sets: every level-s basic interval has the
// same length l_s. Functions are templates over the scalar type so that tests
// can run them in exact rationals; BigReal results use the precision of the
// innermost PrecisionScope.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/descriptor.hpp"
#include "cantorlc/error.hpp"

namespace cantorlc {

inline constexpr int kMaxAddressLevel = 62;

/// I_{j,s}: level s >= 0, index 1 <= j <= 2^s.
struct IntervalAddress {
  int level = 0;
  std::uint64_t index = 1;

  friend bool operator==(const IntervalAddress&, const IntervalAddress&) = default;

  bool valid() const {
    return level >= 0 && level <= kMaxAddressLevel && index >= 1 && index <= (std::uint64_t{1} << level);
  }
  IntervalAddress parent() const { return {level - 1, (index + 1) / 2}; }
  IntervalAddress left_child() const { return {level + 1, 2 * index - 1}; }
  IntervalAddress right_child() const { return {level + 1, 2 * index}; }
  /// The level-k interval containing this one (k <= level).
  IntervalAddress ancestor(int k) const { return {k, ((index - 1) >> (level - k)) + 1}; }
  bool contains(const IntervalAddress& other) const {
    return other.level >= level && other.ancestor(level) == *this;
  }
  std::string str() const { return "(" + std::to_string(index) + "," + std::to_string(level) + ")"; }
};

inline void require_valid(const IntervalAddress& a) {
  if (!a.valid()) throw DomainError("invalid interval address " + a.str());
}

enum class Side { Left, Right };

/// One endpoint of a basic interval. Several references can name the same
/// point; canonical() picks the shallowest one.
struct EndpointRef {
  IntervalAddress addr;
  Side side = Side::Left;

  friend bool operator==(const EndpointRef&, const EndpointRef&) = default;

  EndpointRef canonical() const {
    EndpointRef e = *this;
    while (e.addr.level > 0) {
      const bool odd = e.addr.index % 2 == 1;
      if ((e.side == Side::Left && odd) || (e.side == Side::Right && !odd))
        e.addr = e.addr.parent();
      else
        break;
    }
    return e;
  }

  /// The same point, named through a level-k interval (k >= addr.level).
  EndpointRef at_level(int k) const {
    const int shift = k - addr.level;
    if (shift < 0) throw DomainError("at_level needs a deeper level");
    const std::uint64_t j = side == Side::Left ? ((addr.index - 1) << shift) + 1 : addr.index << shift;
    return {{k, j}, side};
  }

  /// Index of the level-k basic interval containing the point.
  std::uint64_t index_at(int k) const {
    if (k <= addr.level) return addr.ancestor(k).index;
    return at_level(k).addr.index;
  }

  std::string str() const { return addr.str() + (side == Side::Left ? "L" : "R"); }
};

template <class T>
struct BasicInterval {
  IntervalAddress address;
  T left;
  T right;
};

namespace detail {

inline void require_geometric(const SetDescriptor& d) {
  if (!d.is_geometric()) throw DomainError("operation needs a geometrically symmetric set, not K(gamma)");
}

template <class T>
T from_rational(const Rational& q) {
  if constexpr (std::is_same_v<T, Rational>) {
    return q;
  } else {
    return T(q);
  }
}

}  // namespace detail

/// l_s.
template <class T = BigReal>
T length(const SetDescriptor& d, int s) {
  detail::require_geometric(d);
  if (s < 0) throw DomainError("level must be nonnegative");
  if (s == 0) return detail::from_rational<T>(Rational(1));
  switch (d.kind()) {
    case SetKind::GeometricBeta:
      if constexpr (std::is_same_v<T, Rational>) {
        return rational_pow(d.beta_value(), static_cast<unsigned long>(s));
      } else {
        return pow(T(d.beta_value()), static_cast<long>(s));
      }
    case SetKind::GeometricAlpha:
      if constexpr (std::is_same_v<T, Rational>) {
        if (!d.alpha_is_integer()) throw DomainError("l_s is irrational for non-integer alpha");
        const unsigned long a = d.alpha_value().get_num().get_ui();
        mpz_class e;
        mpz_ui_pow_ui(e.get_mpz_t(), a, static_cast<unsigned long>(s - 1));
        if (e > (1UL << 20)) throw BudgetError("exact l_s too large at level " + std::to_string(s));
        return rational_pow(d.ell1(), e.get_ui());
      } else {
        const T exponent = pow(T(d.alpha_value()), static_cast<long>(s - 1));
        return pow(T(d.ell1()), exponent);
      }
    case SetKind::ExplicitLengths: {
      const auto& table = d.length_table();
      if (s >= static_cast<int>(table.size()))
        throw BudgetError("level " + std::to_string(s) + " is beyond the length table");
      return detail::from_rational<T>(table[static_cast<std::size_t>(s)]);
    }
    case SetKind::Julia:
      break;
  }
  throw DomainError("unreachable set kind");
}

/// h_s = l_s - 2 l_{s+1}, the gap between the two children of a level-s interval.
template <class T = BigReal>
T gap(const SetDescriptor& d, int s) {
  return length<T>(d, s) - 2 * length<T>(d, s + 1);
}

/// I_{j,s}, with the left endpoint from the binary expansion of j-1.
template <class T = BigReal>
BasicInterval<T> interval(const SetDescriptor& d, const IntervalAddress& a) {
  detail::require_geometric(d);
  require_valid(a);
  T left = detail::from_rational<T>(Rational(0));
  T prev = detail::from_rational<T>(Rational(1));
  const std::uint64_t bits = a.index - 1;
  for (int k = 1; k <= a.level; ++k) {
    T cur = length<T>(d, k);
    if ((bits >> (a.level - k)) & 1U) left += prev - cur;
    prev = cur;
  }
  T right = left + prev;
  return {a, std::move(left), std::move(right)};
}

/// I_{j,s} together with all its ancestors, innermost first.
inline std::vector<IntervalAddress> chain(const IntervalAddress& a) {
  require_valid(a);
  std::vector<IntervalAddress> out{a};
  while (out.back().level > 0) out.push_back(out.back().parent());
  return out;
}

/// The level-`depth` interval containing x, or nullopt if x is outside
/// E_depth. A shared boundary resolves to the lower index. Endpoints are
/// widened by `slack`, which absorbs rounding in x.
template <class T = BigReal>
std::optional<IntervalAddress> locate(const SetDescriptor& d, const T& x, int depth,
                                      const T& slack = detail::from_rational<T>(Rational(0))) {
  detail::require_geometric(d);
  if (depth < 0) throw DomainError("depth must be nonnegative");
  if (x < -slack || x > 1 + slack) return std::nullopt;
  T left = detail::from_rational<T>(Rational(0));
  T prev = detail::from_rational<T>(Rational(1));
  IntervalAddress a{0, 1};
  for (int k = 1; k <= depth; ++k) {
    T cur = length<T>(d, k);
    if (x <= left + cur + slack) {
      a = a.left_child();
    } else if (x >= left + prev - cur - slack) {
      left += prev - cur;
      a = a.right_child();
    } else {
      return std::nullopt;
    }
    prev = cur;
  }
  return a;
}

/// l_{s+1}^2 >= l_s l_{s+2} for 1 <= s <= s_max - 1, decided exactly.
inline bool check_regularity(const SetDescriptor& d, int s_max) {
  detail::require_geometric(d);
  if (s_max < 1) throw DomainError("s_max must be at least 1");
  switch (d.kind()) {
    case SetKind::GeometricBeta:
      return true;
    case SetKind::GeometricAlpha: {
      // With l_s = l_1^(a^(s-1)) and log l_1 < 0 the inequality reads
      // 2 a^s <= a^(s-1) + a^(s+1).
      const Rational& a = d.alpha_value();
      for (int s = 1; s <= s_max - 1; ++s) {
        const Rational lo = rational_pow(a, static_cast<unsigned long>(s - 1));
        if (2 * lo * a > lo + lo * a * a) return false;
      }
      return true;
    }
    case SetKind::ExplicitLengths: {
      for (int s = 1; s <= s_max - 1; ++s) {
        const Rational l1 = length<Rational>(d, s + 1);
        if (l1 * l1 < length<Rational>(d, s) * length<Rational>(d, s + 2)) return false;
      }
      return true;
    }
    case SetKind::Julia:
      break;
  }
  return false;
}

}  // namespace cantorlc
