#pragma once

// Precomputed basic-interval data for one set at one precision, covering all
// four set kinds. For the symmetric families it stores l_k and the steps
// l_{k-1} - l_k; for K(gamma) it holds the built levels.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/cantor.hpp"
#include "cantorlc/descriptor.hpp"
#include "cantorlc/julia.hpp"
#include "cantorlc/numerics.hpp"

namespace cantorlc {

/// Distances from a point of K to both ends of one basic interval containing
/// it, each with full relative accuracy.
struct AnchoredOffset {
  IntervalAddress anchor;
  BigReal from_left;
  BigReal from_right;
};

class SetGeometry {
 public:
  SetGeometry(SetDescriptor descriptor, PrecisionContext ctx, int max_level)
      : descriptor_(std::move(descriptor)), ctx_(ctx), max_level_(max_level) {
    if (max_level < 0) throw DomainError("max level must be nonnegative");
    if (max_level > kMaxAddressLevel) throw BudgetError("max level exceeds address range");
    if (auto m = descriptor_.max_level(); m && max_level > *m)
      throw BudgetError("level " + std::to_string(max_level) + " is beyond the descriptor's table");
    const auto scope = ctx_.scope();
    if (descriptor_.is_geometric()) {
      lengths_.reserve(static_cast<std::size_t>(max_level) + 1);
      steps_.reserve(static_cast<std::size_t>(max_level) + 1);
      for (int k = 0; k <= max_level; ++k) {
        lengths_.push_back(cantorlc::length<BigReal>(descriptor_, k));
        steps_.push_back(k == 0 ? BigReal(0) : lengths_[k - 1] - lengths_[k]);
      }
    } else {
      julia_ = std::make_shared<JuliaConstruction>(build_levels(descriptor_.gamma(), max_level, ctx_));
    }
  }

  const SetDescriptor& descriptor() const { return descriptor_; }
  const PrecisionContext& context() const { return ctx_; }
  int max_level() const { return max_level_; }
  const JuliaConstruction* julia() const { return julia_.get(); }

  BigReal left(const IntervalAddress& a) const {
    check(a);
    if (julia_) return julia_->level(a.level).intervals[a.index - 1].left;
    const auto scope = ctx_.scope();
    BigReal x = BigReal::zero(ctx_.bits);
    const std::uint64_t bits = a.index - 1;
    for (int k = 1; k <= a.level; ++k)
      if ((bits >> (a.level - k)) & 1U) x += steps_[static_cast<std::size_t>(k)];
    return x;
  }

  BigReal right(const IntervalAddress& a) const {
    if (julia_) {
      check(a);
      return julia_->level(a.level).intervals[a.index - 1].right;
    }
    return left(a) + lengths_[static_cast<std::size_t>(a.level)];
  }

  BigReal length(const IntervalAddress& a) const {
    check(a);
    if (julia_) {
      const auto& iv = julia_->level(a.level).intervals[a.index - 1];
      return iv.right - iv.left;
    }
    return lengths_[static_cast<std::size_t>(a.level)];
  }

  BasicInterval<BigReal> interval(const IntervalAddress& a) const { return {a, left(a), right(a)}; }

  BigReal point(const EndpointRef& e) const { return e.side == Side::Left ? left(e.addr) : right(e.addr); }

  /// Offsets of endpoint e from the ends of its level-`anchor_level` ancestor.
  AnchoredOffset offsets(const EndpointRef& e, int anchor_level) const {
    const EndpointRef deep = e.addr.level >= anchor_level ? e : e.at_level(anchor_level);
    check(deep.addr);
    const IntervalAddress anchor = deep.addr.ancestor(anchor_level);
    const auto scope = ctx_.scope();
    if (julia_) {
      const BigReal x = point(deep);
      return {anchor, x - left(anchor), right(anchor) - x};
    }
    BigReal from_left = BigReal::zero(ctx_.bits);
    BigReal from_right = BigReal::zero(ctx_.bits);
    const int m = deep.addr.level;
    const std::uint64_t bits = deep.addr.index - 1;
    // Smallest terms first.
    if (deep.side == Side::Right)
      from_left += lengths_[static_cast<std::size_t>(m)];
    else
      from_right += lengths_[static_cast<std::size_t>(m)];
    for (int k = m; k > anchor_level; --k) {
      if ((bits >> (m - k)) & 1U)
        from_left += steps_[static_cast<std::size_t>(k)];
      else
        from_right += steps_[static_cast<std::size_t>(k)];
    }
    return {anchor, std::move(from_left), std::move(from_right)};
  }

  /// Position of endpoint e inside interval `within` as a fraction of its
  /// length, in double precision.
  double relative_position(const EndpointRef& e, const IntervalAddress& within) const {
    const auto off = offsets(e, within.level);
    const BigReal len = length(within);
    return (off.from_left / len).to_double();
  }

 private:
  void check(const IntervalAddress& a) const {
    require_valid(a);
    if (a.level > max_level_)
      throw BudgetError("level " + std::to_string(a.level) + " exceeds the geometry's max level " +
                        std::to_string(max_level_));
  }

  SetDescriptor descriptor_;
  PrecisionContext ctx_;
  int max_level_;
  std::vector<BigReal> lengths_;
  std::vector<BigReal> steps_;
  std::shared_ptr<const JuliaConstruction> julia_;
};

}  // namespace cantorlc
