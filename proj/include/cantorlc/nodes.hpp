#pragma once

// Interpolation node arrays on Cantor sets and their occupancy combinatorics.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/cantor.hpp"
#include "cantorlc/descriptor.hpp"
#include "cantorlc/error.hpp"
#include "cantorlc/geometry.hpp"
#include "cantorlc/numerics.hpp"

namespace cantorlc {

enum class PlacementRule { Left, Right, Alternating };

inline std::string to_string(PlacementRule r) {
  switch (r) {
    case PlacementRule::Left:
      return "left";
    case PlacementRule::Right:
      return "right";
    case PlacementRule::Alternating:
      return "alternating";
  }
  return "left";
}

inline PlacementRule parse_placement(std::string_view s) {
  if (s == "left") return PlacementRule::Left;
  if (s == "right") return PlacementRule::Right;
  if (s == "alternating") return PlacementRule::Alternating;
  throw DomainError("unknown placement rule '" + std::string(s) + "' (left, right, alternating)");
}

enum class ProvenanceKind { Endpoints, Uniform, Deleted, Custom };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::Custom;
  int s = 0;
  std::uint64_t count = 0;
  PlacementRule rule = PlacementRule::Left;
  std::optional<std::uint64_t> empty_index;
  // Deleted only.
  std::string base_tag;
  std::size_t removed_index = 0;
  std::optional<BigReal> removed_point;
  std::optional<EndpointRef> removed_ref;

  std::string tag() const {
    switch (kind) {
      case ProvenanceKind::Endpoints:
        return "endpoints(s=" + std::to_string(s) + ")";
      case ProvenanceKind::Uniform: {
        std::string t = "uniform(s=" + std::to_string(s) + ",count=" + std::to_string(count) + ",rule=" +
                        to_string(rule);
        if (empty_index) t += ",empty=" + std::to_string(*empty_index);
        return t + ")";
      }
      case ProvenanceKind::Deleted:
        return "deleted(base=" + base_tag + ",index=" + std::to_string(removed_index) + ")";
      case ProvenanceKind::Custom:
        return "custom";
    }
    return "custom";
  }
};

/// One row X_N of an interpolation array: strictly increasing points of K.
/// Points built from the construction remember which interval endpoint they
/// are, which lets the evaluators form differences without cancellation.
class NodeArray {
 public:
  NodeArray(SetDescriptor descriptor, std::vector<BigReal> points, Provenance provenance,
            std::vector<std::optional<EndpointRef>> refs = {})
      : descriptor_(std::move(descriptor)),
        points_(std::move(points)),
        provenance_(std::move(provenance)),
        refs_(std::move(refs)) {
    if (refs_.empty()) refs_.resize(points_.size());
    if (refs_.size() != points_.size()) throw DomainError("endpoint references do not match the points");
    for (std::size_t i = 1; i < points_.size(); ++i)
      if (!(points_[i - 1] < points_[i])) throw DomainError("node points must be strictly increasing");
    for (auto& r : refs_)
      if (r) r = r->canonical();
  }

  const SetDescriptor& descriptor() const { return descriptor_; }
  const Provenance& provenance() const { return provenance_; }
  const std::vector<BigReal>& points() const { return points_; }
  const BigReal& operator[](std::size_t i) const { return points_[i]; }
  const std::optional<EndpointRef>& ref(std::size_t i) const { return refs_[i]; }
  const std::vector<std::optional<EndpointRef>>& refs() const { return refs_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool all_refs() const {
    return std::all_of(refs_.begin(), refs_.end(), [](const auto& r) { return r.has_value(); });
  }

  /// Deepest construction level needed to separate the points: the node level
  /// ceil(log2 N), at least 1.
  int node_level() const { return std::max(1, ceil_log2(points_.size())); }

  /// Index of the level-k interval holding point i, or nullopt when the point
  /// lies in a gap of E_k.
  std::optional<std::uint64_t> index_at(std::size_t i, int k) const {
    if (refs_[i]) return refs_[i]->index_at(k);
    if (!descriptor_.is_geometric())
      throw DomainError("points without interval references on K(gamma) cannot be located");
    const int bits = points_[i].bits();
    const PrecisionScope scope(bits);
    const BigReal slack = ldexp(BigReal(1), -(bits - 8));
    const auto a = locate<BigReal>(descriptor_, points_[i], k, slack);
    if (!a) return std::nullopt;
    return a->index;
  }

 private:
  SetDescriptor descriptor_;
  std::vector<BigReal> points_;
  Provenance provenance_;
  std::vector<std::optional<EndpointRef>> refs_;
};

namespace detail {

inline NodeArray from_refs(const SetGeometry& g, std::vector<EndpointRef> refs, Provenance p) {
  std::vector<BigReal> pts;
  std::vector<std::optional<EndpointRef>> opt;
  pts.reserve(refs.size());
  for (const auto& r : refs) {
    pts.push_back(g.point(r));
    opt.emplace_back(r);
  }
  return NodeArray(g.descriptor(), std::move(pts), std::move(p), std::move(opt));
}

inline std::uint64_t reverse_bits(std::uint64_t v, int width) {
  std::uint64_t r = 0;
  for (int i = 0; i < width; ++i) r |= ((v >> i) & 1U) << (width - 1 - i);
  return r;
}

}  // namespace detail

/// Y_s: both endpoints of every level-s interval.
inline std::vector<EndpointRef> endpoint_slots(int s) {
  if (s < 0 || s > 30) throw DomainError("endpoint level out of range");
  std::vector<EndpointRef> out;
  for (std::uint64_t j = 1; j <= (std::uint64_t{1} << s); ++j) {
    out.push_back({{s, j}, Side::Left});
    out.push_back({{s, j}, Side::Right});
  }
  return out;
}

/// Occupied level-s intervals of a uniform array with `count` points, in
/// increasing order. The occupied set is the first `count` intervals in
/// bit-reversed order, which is balanced at every level; with count = 2^s - 1
/// this leaves the last interval empty unless `empty_index` names another.
inline std::vector<std::uint64_t> uniform_occupied(int s, std::uint64_t count,
                                                   std::optional<std::uint64_t> empty_index = std::nullopt) {
  if (s < 0 || s > 30) throw DomainError("uniform level out of range");
  const std::uint64_t total = std::uint64_t{1} << s;
  const std::uint64_t lo = s == 0 ? 1 : total / 2;
  if (count < lo || count > total)
    throw DomainError("uniform count " + std::to_string(count) + " outside [2^(s-1), 2^s]");
  std::vector<std::uint64_t> occ;
  if (empty_index) {
    if (count + 1 != total) throw DomainError("an empty index applies only when count = 2^s - 1");
    if (*empty_index < 1 || *empty_index > total) throw DomainError("empty index out of range");
    for (std::uint64_t j = 1; j <= total; ++j)
      if (j != *empty_index) occ.push_back(j);
    return occ;
  }
  for (std::uint64_t r = 0; r < count; ++r) occ.push_back(detail::reverse_bits(r, s) + 1);
  std::sort(occ.begin(), occ.end());
  return occ;
}

inline std::vector<EndpointRef> uniform_slots(int s, std::uint64_t count, PlacementRule rule,
                                              std::optional<std::uint64_t> empty_index = std::nullopt) {
  std::vector<EndpointRef> out;
  for (std::uint64_t j : uniform_occupied(s, count, empty_index)) {
    Side side = Side::Left;
    if (rule == PlacementRule::Right || (rule == PlacementRule::Alternating && j % 2 == 0)) side = Side::Right;
    out.push_back({{s, j}, side});
  }
  return out;
}

inline NodeArray endpoints_Y(const SetGeometry& g, int s) {
  Provenance p;
  p.kind = ProvenanceKind::Endpoints;
  p.s = s;
  return detail::from_refs(g, endpoint_slots(s), p);
}

/// Y_s at a precision sized for level s.
inline NodeArray endpoints_Y(const SetDescriptor& d, int s, int digits = 40) {
  if (s < 0) throw DomainError("level must be nonnegative");
  const SetGeometry g(d, make_context(d, s, std::uint64_t{2} << s, digits), s);
  return endpoints_Y(g, s);
}

inline NodeArray uniform_nodes(const SetGeometry& g, int s, std::uint64_t count, PlacementRule rule,
                               std::optional<std::uint64_t> empty_index = std::nullopt) {
  Provenance p;
  p.kind = ProvenanceKind::Uniform;
  p.s = s;
  p.count = count;
  p.rule = rule;
  if (s > 0 && count + 1 == (std::uint64_t{1} << s)) p.empty_index = empty_index.value_or(count + 1);
  return detail::from_refs(g, uniform_slots(s, count, rule, empty_index), p);
}

inline NodeArray uniform_nodes(const SetDescriptor& d, int s, std::uint64_t count, PlacementRule rule,
                               std::optional<std::uint64_t> empty_index = std::nullopt, int digits = 40) {
  if (s < 0) throw DomainError("level must be nonnegative");
  const SetGeometry g(d, make_context(d, s, std::max<std::uint64_t>(count, 1), digits), s);
  return uniform_nodes(g, s, count, rule, empty_index);
}

/// The array without its index-th smallest point (1-based).
inline NodeArray delete_node(const NodeArray& base, std::size_t index) {
  if (index < 1 || index > base.size())
    throw DomainError("delete index " + std::to_string(index) + " outside [1, " + std::to_string(base.size()) + "]");
  std::vector<BigReal> pts;
  std::vector<std::optional<EndpointRef>> refs;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i + 1 == index) continue;
    pts.push_back(base[i]);
    refs.push_back(base.ref(i));
  }
  Provenance p;
  p.kind = ProvenanceKind::Deleted;
  p.base_tag = base.provenance().tag();
  p.removed_index = index;
  p.removed_point = base[index - 1];
  p.removed_ref = base.ref(index - 1);
  return NodeArray(base.descriptor(), std::move(pts), std::move(p), std::move(refs));
}

/// Points given only by their interval endpoints, in increasing order. The
/// occupancy queries accept this as well as a NodeArray, which avoids building
/// coordinates when only the combinatorics matter.
struct EndpointPattern {
  std::vector<EndpointRef> refs;

  std::size_t size() const { return refs.size(); }
  std::optional<std::uint64_t> index_at(std::size_t i, int k) const { return refs[i].index_at(k); }
};

/// m_{j,s}(Z) = #(Z intersected with I_{j,s}).
template <class Points>
std::uint64_t occupancy(const Points& z, const IntervalAddress& a) {
  require_valid(a);
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto idx = z.index_at(i, a.level);
    if (idx && *idx == a.index) ++m;
  }
  return m;
}

namespace detail {

// Occupancy counts of the nonempty level-k intervals inside `within`, in
// increasing index order. Points are sorted, so their indices are too.
template <class Points>
std::vector<std::pair<std::uint64_t, std::uint64_t>> occupancies(const Points& z, int k,
                                                                 const IntervalAddress& within) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto idx = z.index_at(i, k);
    if (!idx || !within.contains({k, *idx})) continue;
    if (!counts.empty() && counts.back().first == *idx)
      ++counts.back().second;
    else
      counts.emplace_back(*idx, 1);
  }
  return counts;
}

}  // namespace detail

/// R_{j,q}: the deepest level R at which some level-R subinterval of `a`
/// holds exactly two points. nullopt when `depth_limit` is too shallow to
/// separate all points of `a`.
template <class Points>
std::optional<int> max_pair_level(const Points& z, const IntervalAddress& a, int depth_limit) {
  require_valid(a);
  if (occupancy(z, a) < 2) throw DomainError("max_pair_level needs at least two points in " + a.str());
  std::optional<int> best;
  for (int k = a.level; k <= std::min(depth_limit, kMaxAddressLevel); ++k) {
    const auto counts = detail::occupancies(z, k, a);
    bool separated = true;
    for (const auto& [idx, m] : counts) {
      if (m == 2) best = k;
      if (m >= 2) separated = false;
    }
    if (separated) return best;
  }
  return std::nullopt;
}

/// |m_{i,k} - m_{j,k}| <= 1 for all k. Levels 1..depth are checked, then
/// deeper levels until every occupancy is at most 1, past which the
/// condition cannot fail.
template <class Points>
bool is_uniform(const Points& z, int depth) {
  if (depth < 1) throw DomainError("depth must be at least 1");
  for (int k = 1; k <= kMaxAddressLevel; ++k) {
    const auto counts = detail::occupancies(z, k, {0, 1});
    std::uint64_t hi = 0;
    std::uint64_t lo = counts.size() < (std::uint64_t{1} << k) ? 0 : UINT64_MAX;
    for (const auto& [idx, m] : counts) {
      hi = std::max(hi, m);
      lo = std::min(lo, m);
    }
    if (counts.empty()) lo = 0;
    if (hi > lo + 1) return false;
    if (k >= depth && hi <= 1) return true;
  }
  throw BudgetError("points could not be separated within the address range");
}

struct DistanceProfile {
  BigReal source_point;
  std::vector<BigReal> distances;
};

inline DistanceProfile distance_profile(const BigReal& x, const NodeArray& z) {
  DistanceProfile p{x, {}};
  p.distances.reserve(z.size());
  for (const auto& pt : z.points()) p.distances.push_back(abs(x - pt));
  std::sort(p.distances.begin(), p.distances.end(), [](const BigReal& a, const BigReal& b) { return a < b; });
  return p;
}

/// nu_n = #(Z in J_n) for n = 1..R, where J_n is the sibling at level n of the
/// chain of `x_addr`.
inline std::vector<std::pair<int, std::uint64_t>> adjacent_counts(const NodeArray& z, const IntervalAddress& x_addr) {
  require_valid(x_addr);
  if (x_addr.level < 1) throw DomainError("adjacent_counts needs an address of level >= 1");
  std::vector<std::pair<int, std::uint64_t>> out;
  for (int n = 1; n <= x_addr.level; ++n) {
    const IntervalAddress on_chain = x_addr.ancestor(n);
    const IntervalAddress sibling{n, on_chain.index % 2 == 1 ? on_chain.index + 1 : on_chain.index - 1};
    out.emplace_back(n, occupancy(z, sibling));
  }
  return out;
}

// Text format: a header line, then one decimal literal per line.

inline void write_nodes(std::ostream& os, const NodeArray& z) {
  os << "# descriptor=" << z.descriptor().canonical() << " provenance=" << z.provenance().tag() << "\n";
  for (const auto& p : z.points()) os << p.to_string() << "\n";
}

namespace detail {

inline std::map<std::string, std::string> tag_fields(std::string_view body) {
  std::map<std::string, std::string> out;
  for (auto part : split(body, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw DomainError("malformed provenance field '" + std::string(part) + "'");
    out[std::string(part.substr(0, eq))] = std::string(part.substr(eq + 1));
  }
  return out;
}

inline long to_long(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw DomainError("malformed integer '" + s + "'");
  return v;
}

}  // namespace detail

/// Inverse of Provenance::tag(). The removed point of a deleted array is not
/// part of the tag; its endpoint reference is restored when the base is
/// structured.
inline Provenance parse_provenance(std::string_view tag);

/// Endpoint references implied by a provenance, or nullopt for custom arrays.
inline std::optional<std::vector<EndpointRef>> refs_for(const Provenance& p) {
  switch (p.kind) {
    case ProvenanceKind::Endpoints:
      return endpoint_slots(p.s);
    case ProvenanceKind::Uniform:
      return uniform_slots(p.s, p.count, p.rule,
                           p.s > 0 && p.count + 1 == (std::uint64_t{1} << p.s) ? p.empty_index : std::nullopt);
    case ProvenanceKind::Deleted: {
      auto base = refs_for(parse_provenance(p.base_tag));
      if (!base) return std::nullopt;
      if (p.removed_index < 1 || p.removed_index > base->size()) throw DomainError("deleted index out of range");
      base->erase(base->begin() + static_cast<std::ptrdiff_t>(p.removed_index - 1));
      return base;
    }
    case ProvenanceKind::Custom:
      break;
  }
  return std::nullopt;
}

inline Provenance parse_provenance(std::string_view tag) {
  auto body_of = [&](std::size_t prefix) {
    if (tag.back() != ')') throw DomainError("malformed provenance tag '" + std::string(tag) + "'");
    return tag.substr(prefix, tag.size() - prefix - 1);
  };
  Provenance p;
  try {
    if (tag == "custom") return p;
    if (detail::starts_with(tag, "endpoints(")) {
      const auto f = detail::tag_fields(body_of(10));
      p.kind = ProvenanceKind::Endpoints;
      p.s = static_cast<int>(detail::to_long(f.at("s")));
      return p;
    }
    if (detail::starts_with(tag, "uniform(")) {
      const auto f = detail::tag_fields(body_of(8));
      p.kind = ProvenanceKind::Uniform;
      p.s = static_cast<int>(detail::to_long(f.at("s")));
      p.count = static_cast<std::uint64_t>(detail::to_long(f.at("count")));
      p.rule = parse_placement(f.at("rule"));
      if (f.count("empty")) p.empty_index = static_cast<std::uint64_t>(detail::to_long(f.at("empty")));
      return p;
    }
    if (detail::starts_with(tag, "deleted(base=")) {
      const auto body = body_of(13);
      const auto idx_pos = body.rfind(",index=");
      if (idx_pos == std::string_view::npos) throw DomainError("malformed deleted provenance");
      p.kind = ProvenanceKind::Deleted;
      p.base_tag = std::string(body.substr(0, idx_pos));
      p.removed_index = static_cast<std::size_t>(detail::to_long(std::string(body.substr(idx_pos + 7))));
      const Provenance base = parse_provenance(p.base_tag);
      if (auto refs = refs_for(base)) {
        if (p.removed_index < 1 || p.removed_index > refs->size()) throw DomainError("deleted index out of range");
        p.removed_ref = (*refs)[p.removed_index - 1].canonical();
      }
      return p;
    }
  } catch (const std::out_of_range&) {
    throw DomainError("provenance tag '" + std::string(tag) + "' misses a field");
  } catch (const std::invalid_argument&) {
    throw DomainError("provenance tag '" + std::string(tag) + "' has a malformed number");
  }
  throw DomainError("unknown provenance tag '" + std::string(tag) + "'");
}

/// Reads the text format. Points are parsed exactly and rounded to the
/// current precision; structured provenance tags restore interval references.
inline NodeArray read_nodes(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw DomainError("empty node file");
  const std::string d_key = "# descriptor=";
  const std::string p_key = " provenance=";
  const auto p_pos = header.find(p_key);
  if (header.rfind(d_key, 0) != 0 || p_pos == std::string::npos)
    throw DomainError("node file header must read '# descriptor=<set> provenance=<tag>'");
  SetDescriptor d = SetDescriptor::parse(header.substr(d_key.size(), p_pos - d_key.size()));
  Provenance p = parse_provenance(header.substr(p_pos + p_key.size()));

  std::vector<BigReal> pts;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    pts.emplace_back(std::string_view(line));
  }

  std::vector<std::optional<EndpointRef>> refs;
  if (auto r = refs_for(p)) {
    if (r->size() != pts.size())
      throw DomainError("node file has " + std::to_string(pts.size()) + " points but its provenance implies " +
                        std::to_string(r->size()));
    refs.assign(r->begin(), r->end());
  }
  return NodeArray(std::move(d), std::move(pts), std::move(p), std::move(refs));
}

/// The same array with its points recomputed from their interval references
/// at the precision of `g`; points without references are rounded to it.
inline NodeArray rebase(const SetGeometry& g, const NodeArray& z) {
  std::vector<BigReal> pts;
  pts.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z.ref(i))
      pts.push_back(g.point(*z.ref(i)));
    else
      pts.push_back(BigReal::with_bits(z[i], g.context().bits));
  }
  return NodeArray(z.descriptor(), std::move(pts), z.provenance(), z.refs());
}

}  // namespace cantorlc
