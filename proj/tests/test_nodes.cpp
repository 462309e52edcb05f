#include <gtest/gtest.h>

#include <sstream>

#include "cantorlc/cantorlc.hpp"

using namespace cantorlc;

namespace {

const SetDescriptor kTernary = SetDescriptor::beta(Rational(1, 3));

void expect_points(const NodeArray& z, const std::vector<Rational>& expected) {
  ASSERT_EQ(z.size(), expected.size());
  const PrecisionScope scope(z[0].bits());
  const BigReal tol = ldexp(BigReal(1), -(z[0].bits() - 4));
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_LE(abs(z[i] - BigReal(expected[i])), tol) << i;
}

NodeArray custom(const std::vector<Rational>& pts) {
  const PrecisionScope scope(160);
  std::vector<BigReal> v;
  for (const auto& p : pts) v.emplace_back(p);
  return NodeArray(kTernary, std::move(v), Provenance{});
}

EndpointPattern pattern(std::vector<EndpointRef> refs) { return EndpointPattern{std::move(refs)}; }

}  // namespace

TEST(EndpointsY, SmallLevels) {
  expect_points(endpoints_Y(kTernary, 0), {Rational(0), Rational(1)});
  expect_points(endpoints_Y(kTernary, 1), {Rational(0), Rational(1, 3), Rational(2, 3), Rational(1)});
  expect_points(endpoints_Y(kTernary, 2), {Rational(0), Rational(1, 9), Rational(2, 9), Rational(1, 3),
                                           Rational(2, 3), Rational(7, 9), Rational(8, 9), Rational(1)});
  const auto y3 = endpoints_Y(kTernary, 3);
  EXPECT_EQ(y3.size(), 16u);
  EXPECT_TRUE(y3.all_refs());
  EXPECT_EQ(y3.node_level(), 4);
  EXPECT_EQ(y3.provenance().tag(), "endpoints(s=3)");
}

TEST(EndpointsY, MatchesRationalIntervalsOnSquaredSet) {
  const auto d = SetDescriptor::alpha(Rational(2), Rational(1, 3));
  const int s = 3;
  const auto y = endpoints_Y(d, s);
  std::vector<Rational> expected;
  for (std::uint64_t j = 1; j <= 8; ++j) {
    const auto iv = interval<Rational>(d, {s, j});
    expected.push_back(iv.left);
    expected.push_back(iv.right);
  }
  expect_points(y, expected);
}

TEST(Uniform, BitReversedOccupancy) {
  EXPECT_EQ(uniform_occupied(2, 3), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(uniform_occupied(2, 4), (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_EQ(uniform_occupied(3, 4), (std::vector<std::uint64_t>{1, 3, 5, 7}));
  EXPECT_EQ(uniform_occupied(3, 5), (std::vector<std::uint64_t>{1, 2, 3, 5, 7}));
  EXPECT_EQ(uniform_occupied(2, 3, 2), (std::vector<std::uint64_t>{1, 3, 4}));
  EXPECT_THROW(uniform_occupied(3, 3), DomainError);
  EXPECT_THROW(uniform_occupied(3, 9), DomainError);
  EXPECT_THROW(uniform_occupied(3, 8, 2), DomainError);
}

TEST(Uniform, PlacementRules) {
  expect_points(uniform_nodes(kTernary, 1, 2, PlacementRule::Left), {Rational(0), Rational(2, 3)});
  expect_points(uniform_nodes(kTernary, 1, 2, PlacementRule::Right), {Rational(1, 3), Rational(1)});
  expect_points(uniform_nodes(kTernary, 2, 4, PlacementRule::Alternating),
                {Rational(0), Rational(1, 3), Rational(2, 3), Rational(1)});
  const auto z = uniform_nodes(kTernary, 2, 3, PlacementRule::Left);
  expect_points(z, {Rational(0), Rational(2, 9), Rational(2, 3)});
  EXPECT_EQ(z.provenance().tag(), "uniform(s=2,count=3,rule=left,empty=4)");
}

TEST(Uniform, ArraysAreUniformAtEveryCount) {
  for (int s = 1; s <= 6; ++s) {
    for (std::uint64_t c = std::uint64_t{1} << (s - 1); c <= (std::uint64_t{1} << s); ++c) {
      EndpointPattern p{uniform_slots(s, c, PlacementRule::Alternating)};
      EXPECT_TRUE(is_uniform(p, s)) << "s=" << s << " count=" << c;
    }
  }
}

TEST(DeleteNode, Examples) {
  const auto y1 = endpoints_Y(kTernary, 1);
  const auto z = delete_node(y1, 2);
  expect_points(z, {Rational(0), Rational(2, 3), Rational(1)});
  ASSERT_TRUE(z.provenance().removed_ref);
  EXPECT_EQ(*z.provenance().removed_ref, (EndpointRef{{1, 1}, Side::Right}));
  EXPECT_EQ(z.provenance().tag(), "deleted(base=endpoints(s=1),index=2)");
  expect_points(delete_node(y1, 1), {Rational(1, 3), Rational(2, 3), Rational(1)});
  expect_points(delete_node(y1, 4), {Rational(0), Rational(1, 3), Rational(2, 3)});
  EXPECT_THROW(delete_node(y1, 0), DomainError);
  EXPECT_THROW(delete_node(y1, 5), DomainError);
}

TEST(Occupancy, Examples) {
  const auto y1 = endpoints_Y(kTernary, 1);
  EXPECT_EQ(occupancy(y1, {1, 1}), 2u);
  EXPECT_EQ(occupancy(y1, {2, 2}), 1u);
  EXPECT_EQ(occupancy(y1, {0, 1}), 4u);
  // 1/2 lies in the first gap and belongs to no level-1 interval.
  const auto z = custom({Rational(0), Rational(1, 2), Rational(1)});
  EXPECT_EQ(occupancy(z, {1, 1}) + occupancy(z, {1, 2}), 2u);
  EXPECT_EQ(occupancy(custom({Rational(1, 2)}), {1, 1}), 0u);
  EXPECT_THROW(occupancy(y1, {1, 3}), DomainError);
}

TEST(Occupancy, RoundedRationalPointsStillLocate) {
  const auto z = custom({Rational(1, 9), Rational(2, 9), Rational(7, 9)});
  EXPECT_EQ(occupancy(z, {2, 1}), 1u);
  EXPECT_EQ(occupancy(z, {2, 2}), 1u);
  EXPECT_EQ(occupancy(z, {2, 3}), 1u);
}

TEST(Occupancy, PatternAndArrayAgree) {
  const auto y = endpoints_Y(kTernary, 3);
  EndpointPattern p{endpoint_slots(3)};
  for (int k = 0; k <= 5; ++k)
    for (std::uint64_t j = 1; j <= (std::uint64_t{1} << k); ++j)
      EXPECT_EQ(occupancy(y, {k, j}), occupancy(p, {k, j})) << k << "," << j;
}

TEST(MaxPairLevel, Examples) {
  const auto y2 = endpoints_Y(kTernary, 2);
  EXPECT_EQ(max_pair_level(y2, {0, 1}, 10), 2);
  EXPECT_EQ(max_pair_level(y2, {1, 2}, 10), 2);
  EXPECT_EQ(max_pair_level(endpoints_Y(kTernary, 0), {0, 1}, 10), 0);
  EXPECT_EQ(max_pair_level(y2, {0, 1}, 1), std::nullopt);
  EXPECT_THROW(max_pair_level(y2, IntervalAddress{3, 1}, 10), DomainError);
  for (int s = 1; s <= 5; ++s) {
    const auto u = uniform_nodes(kTernary, s, std::uint64_t{1} << s, PlacementRule::Left);
    EXPECT_EQ(max_pair_level(u, {0, 1}, 20), s - 1) << s;
  }
}

TEST(IsUniform, Examples) {
  EXPECT_TRUE(is_uniform(endpoints_Y(kTernary, 2), 2));
  EXPECT_TRUE(is_uniform(delete_node(endpoints_Y(kTernary, 1), 2), 1));
  EXPECT_FALSE(is_uniform(pattern({{{2, 1}, Side::Left}, {{2, 1}, Side::Right}, {{2, 2}, Side::Left}}), 2));
  // Balanced at level 1 but not at level 2.
  EXPECT_FALSE(is_uniform(pattern({{{2, 1}, Side::Left}, {{2, 1}, Side::Right}, {{2, 3}, Side::Left},
                                   {{2, 3}, Side::Right}}),
                          1));
  EXPECT_TRUE(is_uniform(pattern({{{2, 1}, Side::Left}, {{2, 3}, Side::Left}}), 2));
  EXPECT_THROW(is_uniform(endpoints_Y(kTernary, 1), 0), DomainError);
}

TEST(DistanceProfile, Examples) {
  const PrecisionScope scope(160);
  const auto y1 = endpoints_Y(kTernary, 1);
  const auto p = distance_profile(BigReal(Rational(1, 2)), y1);
  ASSERT_EQ(p.distances.size(), 4u);
  const std::vector<Rational> expected{Rational(1, 6), Rational(1, 6), Rational(1, 2), Rational(1, 2)};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(abs(p.distances[i] - BigReal(expected[i])), BigReal(1e-40));
  const auto q = distance_profile(y1[0], y1);
  EXPECT_TRUE(q.distances[0].is_zero());
  EXPECT_LT(abs(q.distances[3] - 1), BigReal(1e-40));
}

TEST(AdjacentCounts, Examples) {
  const auto y1 = endpoints_Y(kTernary, 1);
  EXPECT_EQ(adjacent_counts(y1, {1, 1}), (std::vector<std::pair<int, std::uint64_t>>{{1, 2}}));
  const auto left_only = custom({Rational(0), Rational(1, 3)});
  EXPECT_EQ(adjacent_counts(left_only, {1, 1}), (std::vector<std::pair<int, std::uint64_t>>{{1, 0}}));
  const auto y2 = endpoints_Y(kTernary, 2);
  EXPECT_EQ(adjacent_counts(y2, {2, 1}), (std::vector<std::pair<int, std::uint64_t>>{{1, 4}, {2, 2}}));
  EXPECT_THROW(adjacent_counts(y2, {0, 1}), DomainError);
}

TEST(NodeArray, RejectsUnsortedPoints) {
  const PrecisionScope scope(128);
  EXPECT_THROW(NodeArray(kTernary, {BigReal(1), BigReal(0)}, Provenance{}), DomainError);
  EXPECT_THROW(NodeArray(kTernary, {BigReal(0), BigReal(0)}, Provenance{}), DomainError);
}

TEST(NodeFile, RoundTrips) {
  const std::vector<NodeArray> arrays{
      endpoints_Y(kTernary, 2),
      uniform_nodes(kTernary, 3, 7, PlacementRule::Right, std::uint64_t{3}),
      delete_node(endpoints_Y(SetDescriptor::alpha(Rational(2), Rational(1, 3)), 2), 5),
      custom({Rational(0), Rational(1, 9), Rational(7, 9)}),
  };
  for (const auto& z : arrays) {
    std::stringstream ss;
    write_nodes(ss, z);
    const PrecisionScope scope(z[0].bits());
    const auto back = read_nodes(ss);
    EXPECT_EQ(back.descriptor(), z.descriptor());
    EXPECT_EQ(back.provenance().tag(), z.provenance().tag());
    EXPECT_EQ(back.refs(), z.refs());
    ASSERT_EQ(back.size(), z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      EXPECT_LE(abs(back[i] - z[i]), ldexp(BigReal(1), -(z[0].bits() - 8))) << z.provenance().tag() << " " << i;
  }
}

TEST(NodeFile, RejectsMalformedInput) {
  std::stringstream empty;
  EXPECT_THROW(read_nodes(empty), DomainError);
  std::stringstream no_header("0\n1\n");
  EXPECT_THROW(read_nodes(no_header), DomainError);
  std::stringstream wrong_count("# descriptor=beta:1/3 provenance=endpoints(s=1)\n0\n1\n");
  EXPECT_THROW(read_nodes(wrong_count), DomainError);
  std::stringstream bad_tag("# descriptor=beta:1/3 provenance=uniform(s=2)\n0\n");
  EXPECT_THROW(read_nodes(bad_tag), DomainError);
  EXPECT_THROW(parse_placement("middle"), DomainError);
}
