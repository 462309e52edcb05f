#pragma once

// Fundamental Lagrange polynomials, Lebesgue functions and a branch-and-bound
// estimate of the Lebesgue constant over a Cantor set.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/cantor.hpp"
#include "cantorlc/error.hpp"
#include "cantorlc/geometry.hpp"
#include "cantorlc/nodes.hpp"
#include "cantorlc/numerics.hpp"
#include "cantorlc/parallel.hpp"

namespace cantorlc {

/// l_k(x) for the k-th node (1-based), as a sign and a logarithm.
inline LogMagnitude fundamental(const NodeArray& z, std::size_t k, const BigReal& x) {
  if (k < 1 || k > z.size()) throw DomainError("fundamental index out of range");
  const BigReal& xk = z[k - 1];
  if (x == xk) return LogMagnitude::one();
  LogMagnitude acc = LogMagnitude::one();
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i == k - 1) continue;
    const BigReal num = x - z[i];
    if (num.is_zero()) return LogMagnitude::zero();
    acc = acc * log_of(num) / log_of(xk - z[i]);
  }
  return acc;
}

namespace detail {

class Scratch {
 public:
  explicit Scratch(int bits) { mpfr_init2(v_, bits); }
  ~Scratch() { mpfr_clear(v_); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace detail

/// Barycentric evaluation for one node array. With w_k = 1/prod_{i!=k}(x_k - x_i)
/// and d_i = x - x_i,
///   l_k(x) = w_k / d_k * prod_i d_i,   lambda(x) = prod_i |d_i| * sum_k |w_k| / |d_k|.
/// All products are formed directly; MPFR's exponent range absorbs the
/// magnitudes that would overflow a double.
class LebesgueEvaluator {
 public:
  /// How the difference to one node is formed relative to an anchor interval.
  enum class Mode : std::uint8_t { AtLeft, AtRight, Below, Above, Inside };

  /// Per-anchor differences, reused by every point inside the anchor.
  struct Anchor {
    IntervalAddress addr;
    std::vector<BigReal> base;
    std::vector<Mode> mode;
  };

  explicit LebesgueEvaluator(const NodeArray& z) : refs_(z.refs()) {
    x_ = z.points();
    bits_ = kMinBits;
    for (const auto& p : x_) bits_ = std::max(bits_, p.bits());
    const PrecisionScope scope(bits_);
    w_.reserve(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k) {
      BigReal prod(1);
      for (std::size_t i = 0; i < x_.size(); ++i)
        if (i != k) prod *= x_[k] - x_[i];
      w_.push_back(BigReal(1) / prod);
      abs_w_.push_back(abs(w_.back()));
    }
  }

  std::size_t size() const { return x_.size(); }
  int bits() const { return bits_; }
  const std::vector<BigReal>& weights() const { return w_; }

  BigReal lambda(const BigReal& x) const {
    return kernel([&](std::size_t i, mpfr_ptr d) { mpfr_sub(d, x.get(), x_[i].get(), MPFR_RNDN); });
  }

  /// sum_k f_k l_k(x).
  BigReal interpolate(std::span<const BigReal> f, const BigReal& x) const {
    if (f.size() != x_.size()) throw DomainError("interpolate needs one value per node");
    const PrecisionScope scope(bits_);
    BigReal omega(1);
    BigReal sum(0);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const BigReal d = x - x_[i];
      if (d.is_zero()) return BigReal::with_bits(f[i], bits_);
      omega *= d;
      sum += f[i] * w_[i] / d;
    }
    return omega * sum;
  }

  Anchor anchor(const SetGeometry& g, const IntervalAddress& a) const {
    const PrecisionScope scope(bits_);
    Anchor out{a, {}, {}};
    const BigReal left = g.left(a);
    const BigReal right = g.right(a);
    const EndpointRef left_ref = EndpointRef{a, Side::Left}.canonical();
    const EndpointRef right_ref = EndpointRef{a, Side::Right}.canonical();
    out.base.reserve(x_.size());
    out.mode.reserve(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) {
      Mode m;
      if (refs_[i] ? *refs_[i] == left_ref : x_[i] == left)
        m = Mode::AtLeft;
      else if (refs_[i] ? *refs_[i] == right_ref : x_[i] == right)
        m = Mode::AtRight;
      else if (x_[i] < left)
        m = Mode::Below;
      else if (x_[i] > right)
        m = Mode::Above;
      else
        m = Mode::Inside;
      out.mode.push_back(m);
      out.base.push_back(m == Mode::Above ? BigReal(right - x_[i]) : BigReal(left - x_[i]));
    }
    return out;
  }

  /// lambda at the point whose offsets from the anchor's ends are `off`.
  BigReal lambda(const Anchor& a, const AnchoredOffset& off) const {
    return kernel([&](std::size_t i, mpfr_ptr d) {
      switch (a.mode[i]) {
        case Mode::AtLeft:
          mpfr_set(d, off.from_left.get(), MPFR_RNDN);
          break;
        case Mode::AtRight:
          mpfr_neg(d, off.from_right.get(), MPFR_RNDN);
          break;
        case Mode::Above:
          mpfr_sub(d, a.base[i].get(), off.from_right.get(), MPFR_RNDN);
          break;
        case Mode::Below:
        case Mode::Inside:
          mpfr_add(d, a.base[i].get(), off.from_left.get(), MPFR_RNDN);
          break;
      }
    });
  }

 private:
  template <class DiffFn>
  BigReal kernel(DiffFn&& diff) const {
    BigReal::default_bits();  // widens this thread's exponent range
    detail::Scratch d(bits_), prod(bits_), sum(bits_), t(bits_);
    mpfr_set_ui(prod.get(), 1, MPFR_RNDN);
    mpfr_set_zero(sum.get(), 1);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      diff(i, d.get());
      if (mpfr_zero_p(d.get())) return BigReal::with_bits(BigReal(1), bits_);
      mpfr_abs(d.get(), d.get(), MPFR_RNDN);
      mpfr_mul(prod.get(), prod.get(), d.get(), MPFR_RNDN);
      mpfr_div(t.get(), abs_w_[i].get(), d.get(), MPFR_RNDN);
      mpfr_add(sum.get(), sum.get(), t.get(), MPFR_RNDN);
    }
    BigReal out = BigReal::zero(bits_);
    mpfr_mul(out.raw(), prod.get(), sum.get(), MPFR_RNDN);
    return out;
  }

  std::vector<BigReal> x_;
  std::vector<BigReal> w_;
  std::vector<BigReal> abs_w_;
  std::vector<std::optional<EndpointRef>> refs_;
  int bits_ = kMinBits;
};

/// lambda_N(x) = sum_k |l_k(x)|; exactly 1 at a node.
inline BigReal lebesgue_function(const NodeArray& z, const BigReal& x) { return LebesgueEvaluator(z).lambda(x); }

inline BigReal interpolate(const NodeArray& z, std::span<const BigReal> f, const BigReal& x) {
  return LebesgueEvaluator(z).interpolate(f, x);
}

/// Total order of endpoint positions.
inline bool point_less(const EndpointRef& a, const EndpointRef& b) {
  const int k = std::max(a.addr.level, b.addr.level);
  const EndpointRef x = a.at_level(k);
  const EndpointRef y = b.at_level(k);
  if (x.addr.index != y.addr.index) return x.addr.index < y.addr.index;
  return x.side == Side::Left && y.side == Side::Right;
}

/// Level at which search and witness evaluation anchor their points: the
/// node level, deepened so that every node with a reference is an endpoint
/// of a level-L interval.
inline int anchor_level(const NodeArray& z) {
  int level = z.node_level();
  for (const auto& r : z.refs())
    if (r) level = std::max(level, r->addr.level);
  return level;
}

struct PointValue {
  BigReal x;
  BigReal lambda;
  std::optional<EndpointRef> ref;
};

namespace detail {

class AnchoredLambda {
 public:
  AnchoredLambda(const SetGeometry& g, const NodeArray& z, unsigned threads)
      : g_(g), z_(rebase(g, z)), ev_(z_), level_(anchor_level(z_)) {
    if (level_ > g.max_level()) throw BudgetError("geometry is too shallow for the node array");
    const std::size_t count = std::size_t{1} << level_;
    anchors_.resize(count);
    parallel_for(count, threads, g.context().bits, [&](std::size_t i) {
      anchors_[i] = ev_.anchor(g_, {level_, i + 1});
    });
  }

  int level() const { return level_; }
  const NodeArray& nodes() const { return z_; }
  const SetGeometry& geometry() const { return g_; }

  BigReal operator()(const EndpointRef& e) const {
    const auto off = g_.offsets(e, level_);
    return ev_.lambda(anchors_[off.anchor.index - 1], off);
  }

 private:
  const SetGeometry& g_;
  NodeArray z_;
  LebesgueEvaluator ev_;
  int level_;
  std::vector<LebesgueEvaluator::Anchor> anchors_;
};

using PointKey = std::tuple<int, std::uint64_t, int>;

inline PointKey key_of(const EndpointRef& e) {
  const EndpointRef c = e.canonical();
  return {c.addr.level, c.addr.index, c.side == Side::Left ? 0 : 1};
}

// Prefers the larger value, then the smaller point.
inline bool better(const BigReal& v, const EndpointRef& p, const BigReal& best_v, const EndpointRef& best_p) {
  const int c = compare(v, best_v);
  if (c != 0) return c > 0;
  return point_less(p, best_p);
}

}  // namespace detail

/// lambda_N at one endpoint of the construction.
inline BigReal lambda_at(const SetGeometry& g, const NodeArray& z, const EndpointRef& e) {
  const PrecisionScope scope(g.context().bits);
  return detail::AnchoredLambda(g, z, 1)(e);
}

/// Maximum of lambda_N over every endpoint of level `level`: the exhaustive
/// reference for the search.
inline PointValue endpoint_maximum(const SetGeometry& g, const NodeArray& z, int level, unsigned threads = 0) {
  if (z.empty()) throw DomainError("node array is empty");
  const PrecisionScope scope(g.context().bits);
  const detail::AnchoredLambda eval(g, z, threads);
  if (level < eval.level()) throw DomainError("exhaustive level must be at least the anchor level");
  const auto refs = endpoint_slots(level);
  std::vector<BigReal> values(refs.size());
  parallel_for(refs.size(), threads, g.context().bits, [&](std::size_t i) { values[i] = eval(refs[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < refs.size(); ++i)
    if (detail::better(values[i], refs[i], values[best], refs[best])) best = i;
  return {g.point(refs[best]), values[best], refs[best].canonical()};
}

struct SearchConfig {
  int depth = 6;
  int samples_per_interval = 5;
  double keep_margin = 0.5;
  double rel_tol = 1e-6;
  unsigned threads = 0;

  void validate() const {
    if (depth < 1) throw DomainError("search depth must be at least 1");
    if (samples_per_interval < 2) throw DomainError("samples per interval must be at least 2");
    if (!(keep_margin > 0.0 && keep_margin < 1.0)) throw DomainError("keep margin must lie in (0, 1)");
    if (!(rel_tol > 0.0)) throw DomainError("relative tolerance must be positive");
  }
};

struct LebesgueReport {
  std::uint64_t node_count = 0;
  BigReal lambda_max;
  BigReal argmax;
  std::optional<EndpointRef> argmax_ref;
  /// Levels descended below the node level in the last completed round.
  int search_depth = 0;
  int node_level = 0;
  std::uint64_t evaluations = 0;
  bool stabilized = false;
  int precision_bits = 0;
  /// Best value after each round.
  std::vector<BigReal> history;
};

/// Relative sample positions 1/2, 1/4, 3/4, 1/8, 5/8, ... (base-2 van der Corput).
inline std::vector<double> van_der_corput(int count) {
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) {
    double v = 0.0;
    double scale = 0.5;
    for (int n = i; n > 0; n >>= 1, scale /= 2) v += (n & 1) * scale;
    out.push_back(v);
  }
  return out;
}

/// Geometry deep enough for a search of `depth` levels below the anchor
/// level, with precision sized for the anchor level on symmetric sets and
/// for the deepest level on K(gamma).
inline SetGeometry search_geometry(const SetDescriptor& d, const NodeArray& z, int depth, int digits) {
  const int level = anchor_level(z);
  const int deepest = level + depth + 2;
  const auto ctx = make_context(d, d.is_geometric() ? level : deepest, std::max<std::uint64_t>(z.size(), 1), digits);
  return SetGeometry(d, ctx, deepest);
}

/// Branch-and-bound estimate of sup_K lambda_N. Round r evaluates the active
/// intervals of level L + r at both endpoints and at interior samples snapped
/// to level L + r + 2 endpoints, keeps the intervals within keep_margin of
/// the best value, and descends. The search stops after `depth` rounds or
/// once the best value moved by less than rel_tol over two consecutive
/// rounds. The reported value is attained at a point of K.
inline LebesgueReport lebesgue_constant(const SetGeometry& g, const NodeArray& z, const SearchConfig& cfg) {
  cfg.validate();
  if (z.empty()) throw DomainError("node array is empty");
  const int bits = g.context().bits;
  const PrecisionScope scope(bits);
  const detail::AnchoredLambda eval(g, z, cfg.threads);
  const int level = eval.level();
  if (level + cfg.depth + 2 > g.max_level())
    throw BudgetError("geometry max level " + std::to_string(g.max_level()) + " is too shallow for depth " +
                      std::to_string(cfg.depth));

  LebesgueReport report;
  report.node_count = z.size();
  report.node_level = level;
  report.precision_bits = bits;

  const auto positions = van_der_corput(cfg.samples_per_interval - 2);
  std::map<detail::PointKey, BigReal> cache;
  std::vector<IntervalAddress> active;
  for (std::uint64_t j = 1; j <= (std::uint64_t{1} << level); ++j) active.push_back({level, j});

  std::optional<EndpointRef> best_ref;
  BigReal best_value(0);
  int quiet_rounds = 0;
  const BigReal keep = BigReal(1.0 - cfg.keep_margin);

  for (int r = 0; r <= cfg.depth; ++r) {
    const int k = level + r;
    // Candidate endpoints per interval.
    std::vector<std::vector<EndpointRef>> cands(active.size());
    std::vector<double> shared_pos;
    const bool symmetric = g.descriptor().is_geometric();
    auto grandchild_refs = [&](const IntervalAddress& a) {
      std::vector<EndpointRef> gc;
      for (std::uint64_t q = 1; q <= 4; ++q)
        for (Side side : {Side::Left, Side::Right}) gc.push_back({{k + 2, 4 * (a.index - 1) + q}, side});
      return gc;
    };
    if (symmetric && !positions.empty()) {
      for (const auto& e : grandchild_refs({k, 1})) shared_pos.push_back(g.relative_position(e, {k, 1}));
    }
    for (std::size_t i = 0; i < active.size(); ++i) {
      const auto& a = active[i];
      auto& c = cands[i];
      c.push_back({a, Side::Left});
      c.push_back({a, Side::Right});
      if (positions.empty()) continue;
      const auto gc = grandchild_refs(a);
      std::vector<double> pos = shared_pos;
      if (!symmetric) {
        pos.clear();
        for (const auto& e : gc) pos.push_back(g.relative_position(e, a));
      }
      for (double t : positions) {
        std::size_t pick = 0;
        for (std::size_t q = 1; q < gc.size(); ++q)
          if (std::abs(pos[q] - t) < std::abs(pos[pick] - t)) pick = q;
        c.push_back(gc[pick]);
      }
      std::sort(c.begin(), c.end(), point_less);
      c.erase(std::unique(c.begin(), c.end(),
                          [](const EndpointRef& x, const EndpointRef& y) { return detail::key_of(x) == detail::key_of(y); }),
              c.end());
    }

    std::vector<EndpointRef> todo;
    std::map<detail::PointKey, std::size_t> todo_index;
    for (const auto& c : cands)
      for (const auto& e : c) {
        const auto key = detail::key_of(e);
        if (cache.count(key) || todo_index.count(key)) continue;
        todo_index[key] = todo.size();
        todo.push_back(e);
      }
    std::vector<BigReal> values(todo.size());
    parallel_for(todo.size(), cfg.threads, bits, [&](std::size_t i) { values[i] = eval(todo[i]); });
    report.evaluations += todo.size();
    for (std::size_t i = 0; i < todo.size(); ++i) cache.emplace(detail::key_of(todo[i]), std::move(values[i]));

    std::vector<BigReal> interval_best(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      std::optional<EndpointRef> local;
      for (const auto& e : cands[i]) {
        const BigReal& v = cache.at(detail::key_of(e));
        if (!local || detail::better(v, e, interval_best[i], *local)) {
          interval_best[i] = v;
          local = e;
        }
        if (!best_ref || detail::better(v, e, best_value, *best_ref)) {
          best_value = v;
          best_ref = e.canonical();
        }
      }
    }

    report.history.push_back(best_value);
    report.search_depth = r;
    if (r > 0) {
      const BigReal& prev = report.history[report.history.size() - 2];
      const double change = ((best_value - prev) / best_value).to_double();
      quiet_rounds = change < cfg.rel_tol ? quiet_rounds + 1 : 0;
      if (quiet_rounds >= 2) break;
    }
    if (r == cfg.depth) break;

    const BigReal threshold = keep * best_value;
    std::vector<IntervalAddress> next;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (interval_best[i] >= threshold) {
        next.push_back(active[i].left_child());
        next.push_back(active[i].right_child());
      }
    }
    active = std::move(next);
  }

  report.stabilized = quiet_rounds >= std::min(2, cfg.depth);
  report.lambda_max = best_value;
  report.argmax_ref = best_ref;
  report.argmax = g.point(*best_ref);
  return report;
}

/// Search with a geometry built for the nodes and `digits`.
inline LebesgueReport lebesgue_constant(const SetDescriptor& d, const NodeArray& z, const SearchConfig& cfg,
                                        int digits = 40) {
  cfg.validate();
  if (z.empty()) throw DomainError("node array is empty");
  return lebesgue_constant(search_geometry(d, z, cfg.depth, digits), z, cfg);
}

enum class WitnessRule {
  /// x = l_s for Y_{s-1}, s >= 3: the right endpoint of I_{1,s}.
  Endpoint,
  /// The node removed from a deleted-node array.
  DeletedNode,
  /// The larger of the two endpoint values of the empty interval of a
  /// uniform array with 2^s - 1 points.
  EmptyInterval,
};

inline std::string to_string(WitnessRule w) {
  switch (w) {
    case WitnessRule::Endpoint:
      return "endpoint";
    case WitnessRule::DeletedNode:
      return "deleted-node";
    case WitnessRule::EmptyInterval:
      return "empty-interval";
  }
  return "endpoint";
}

inline WitnessRule parse_witness(std::string_view s) {
  if (s == "endpoint") return WitnessRule::Endpoint;
  if (s == "deleted-node") return WitnessRule::DeletedNode;
  if (s == "empty-interval") return WitnessRule::EmptyInterval;
  throw DomainError("unknown witness rule '" + std::string(s) + "'");
}

/// lambda_N at the designated witness point of the array's provenance.
inline PointValue witness_lambda(const SetGeometry& g, const NodeArray& z, WitnessRule rule) {
  const auto& p = z.provenance();
  const PrecisionScope scope(g.context().bits);
  switch (rule) {
    case WitnessRule::Endpoint: {
      if (p.kind != ProvenanceKind::Endpoints || p.s + 1 < 3)
        throw DomainError("endpoint witness needs nodes Y_{s-1} with s >= 3");
      const EndpointRef e{{p.s + 1, 1}, Side::Right};
      return {g.point(e), lambda_at(g, z, e), e};
    }
    case WitnessRule::DeletedNode: {
      if (p.kind != ProvenanceKind::Deleted) throw DomainError("deleted-node witness needs a deleted-node array");
      if (p.removed_ref) return {g.point(*p.removed_ref), lambda_at(g, z, *p.removed_ref), p.removed_ref};
      if (!p.removed_point) throw DomainError("the removed node is unknown");
      const BigReal x = BigReal::with_bits(*p.removed_point, g.context().bits);
      return {x, LebesgueEvaluator(rebase(g, z)).lambda(x), std::nullopt};
    }
    case WitnessRule::EmptyInterval: {
      if (p.kind != ProvenanceKind::Uniform || !p.empty_index)
        throw DomainError("empty-interval witness needs a uniform array with 2^s - 1 points");
      const IntervalAddress a{p.s, *p.empty_index};
      const detail::AnchoredLambda eval(g, z, 1);
      const EndpointRef l{a, Side::Left};
      const EndpointRef r{a, Side::Right};
      BigReal vl = eval(l);
      BigReal vr = eval(r);
      if (detail::better(vr, r, vl, l)) return {g.point(r), std::move(vr), r.canonical()};
      return {g.point(l), std::move(vl), l.canonical()};
    }
  }
  throw DomainError("unknown witness rule");
}

}  // namespace cantorlc
