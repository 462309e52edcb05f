#include <gtest/gtest.h>

#include <random>

#include "cantorlc/cantorlc.hpp"

using namespace cantorlc;

namespace {

const SetDescriptor kTernary = SetDescriptor::beta(Rational(1, 3));
const SetDescriptor kSquare = SetDescriptor::alpha(Rational(2), Rational(1, 3));

// Independent oracle: the level-s intervals by recursive subdivision.
std::vector<std::pair<Rational, Rational>> subdivide(const SetDescriptor& d, int s) {
  std::vector<std::pair<Rational, Rational>> cur{{Rational(0), Rational(1)}};
  for (int k = 1; k <= s; ++k) {
    const Rational l = length<Rational>(d, k);
    std::vector<std::pair<Rational, Rational>> next;
    for (const auto& [a, b] : cur) {
      next.emplace_back(a, a + l);
      next.emplace_back(b - l, b);
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

TEST(Descriptor, ValidatesFamilies) {
  EXPECT_THROW(SetDescriptor::beta(Rational(1, 2)), DomainError);
  EXPECT_THROW(SetDescriptor::beta(Rational(0)), DomainError);
  EXPECT_NO_THROW(SetDescriptor::beta(Rational(1, 3)));
  EXPECT_THROW(SetDescriptor::alpha(Rational(1), Rational(1, 3)), DomainError);
  EXPECT_THROW(SetDescriptor::alpha(Rational(3, 2), Rational(1, 3)), DomainError);
  EXPECT_NO_THROW(SetDescriptor::alpha(Rational(3, 2), Rational(1, 9)));
  EXPECT_THROW(SetDescriptor::explicit_lengths({Rational(1), Rational(1, 2)}), DomainError);
  EXPECT_THROW(SetDescriptor::explicit_lengths({Rational(1, 2), Rational(1, 9)}), DomainError);
  EXPECT_NO_THROW(SetDescriptor::explicit_lengths({Rational(1), Rational(1, 3), Rational(1, 100)}));
}

TEST(Descriptor, ParseAndCanonicalRoundTrip) {
  for (const char* text : {"beta:1/3", "beta:1/9", "alpha:2,ell1:1/3", "alpha:3/2,ell1:1/9",
                           "lengths:1;1/3;1/100;1/900", "julia:geom:1/32,1/2", "julia:table:1/32;1/64"}) {
    const auto d = SetDescriptor::parse(text);
    EXPECT_EQ(d.canonical(), text);
    EXPECT_EQ(SetDescriptor::parse(d.canonical()), d);
  }
  EXPECT_EQ(SetDescriptor::parse("ternary"), kTernary);
  EXPECT_THROW(SetDescriptor::parse("sierpinski:1/2"), DomainError);
  EXPECT_THROW(SetDescriptor::parse("alpha:2"), DomainError);
  EXPECT_THROW(SetDescriptor::parse("julia:geom:1/5,1/2"), DomainError);
}

TEST(Length, Examples) {
  EXPECT_EQ(length<Rational>(kTernary, 2), Rational(1, 9));
  EXPECT_EQ(length<Rational>(kSquare, 3), Rational(1, 81));
  EXPECT_EQ(length<Rational>(kTernary, 0), Rational(1));
  EXPECT_EQ(length<Rational>(kSquare, 0), Rational(1));
  EXPECT_THROW(length<Rational>(kTernary, -1), DomainError);
  EXPECT_THROW(length<Rational>(SetDescriptor::explicit_lengths({Rational(1), Rational(1, 3)}), 2), BudgetError);
}

TEST(Length, BigRealAgreesWithRationals) {
  for (const auto& d : {kTernary, kSquare}) {
    const auto ctx = make_context(d, 6, 1, 30);
    const auto scope = ctx.scope();
    for (int s = 0; s <= 6; ++s) {
      const BigReal exact(length<Rational>(d, s));
      EXPECT_LT(abs(length<BigReal>(d, s) - exact) / exact, BigReal(1e-40)) << d.canonical() << " s=" << s;
    }
  }
}

TEST(Gap, Examples) {
  EXPECT_EQ(gap<Rational>(kTernary, 0), Rational(1, 3));
  EXPECT_EQ(gap<Rational>(kSquare, 1), Rational(1, 9));
  EXPECT_EQ(gap<Rational>(kSquare, 2), Rational(7, 81));
}

TEST(Gap, AtLeastAThirdOfTheLength) {
  const auto lengths = SetDescriptor::explicit_lengths(
      {Rational(1), Rational(1, 3), Rational(1, 10), Rational(1, 40), Rational(1, 400)});
  for (const auto& d : {kTernary, kSquare, lengths})
    for (int s = 0; s <= 3; ++s) EXPECT_GE(gap<Rational>(d, s), length<Rational>(d, s) / 3);
}

TEST(Interval, Examples) {
  const auto a = interval<Rational>(kTernary, {1, 2});
  EXPECT_EQ(a.left, Rational(2, 3));
  EXPECT_EQ(a.right, Rational(1));
  const auto b = interval<Rational>(kTernary, {2, 3});
  EXPECT_EQ(b.left, Rational(2, 3));
  EXPECT_EQ(b.right, Rational(7, 9));
  const auto c = interval<Rational>(kSquare, {0, 1});
  EXPECT_EQ(c.left, Rational(0));
  EXPECT_EQ(c.right, Rational(1));
  EXPECT_THROW(interval<Rational>(kTernary, {2, 5}), DomainError);
}

TEST(Interval, MatchesSubdivisionOracle) {
  for (const auto& d : {kTernary, kSquare}) {
    for (int s = 0; s <= 5; ++s) {
      const auto oracle = subdivide(d, s);
      for (std::uint64_t j = 1; j <= oracle.size(); ++j) {
        const auto iv = interval<Rational>(d, {s, j});
        EXPECT_EQ(iv.left, oracle[j - 1].first);
        EXPECT_EQ(iv.right, oracle[j - 1].second);
      }
    }
  }
}

TEST(Interval, NestingGapLawAndEndpointPersistence) {
  for (const auto& d : {kTernary, kSquare}) {
    for (int s = 0; s <= 5; ++s) {
      const Rational h = gap<Rational>(d, s);
      for (std::uint64_t j = 1; j <= (std::uint64_t{1} << s); ++j) {
        const IntervalAddress a{s, j};
        const auto p = interval<Rational>(d, a);
        const auto l = interval<Rational>(d, a.left_child());
        const auto r = interval<Rational>(d, a.right_child());
        EXPECT_EQ(p.right - p.left, length<Rational>(d, s));
        EXPECT_EQ(l.left, p.left);
        EXPECT_EQ(r.right, p.right);
        EXPECT_EQ(l.right + h, r.left);
      }
    }
  }
}

TEST(Chain, Examples) {
  EXPECT_EQ(chain({2, 3}), (std::vector<IntervalAddress>{{2, 3}, {1, 2}, {0, 1}}));
  EXPECT_EQ(chain({0, 1}), (std::vector<IntervalAddress>{{0, 1}}));
  EXPECT_EQ(chain({3, 8}), (std::vector<IntervalAddress>{{3, 8}, {2, 4}, {1, 2}, {0, 1}}));
}

TEST(Address, ChildrenParentsAndAncestors) {
  const IntervalAddress a{3, 5};
  EXPECT_EQ(a.left_child(), (IntervalAddress{4, 9}));
  EXPECT_EQ(a.right_child(), (IntervalAddress{4, 10}));
  EXPECT_EQ(a.left_child().parent(), a);
  EXPECT_EQ(a.right_child().parent(), a);
  EXPECT_EQ((IntervalAddress{5, 19}).ancestor(3), a);
  EXPECT_TRUE(a.contains({5, 19}));
  EXPECT_FALSE(a.contains({5, 21}));
  EXPECT_EQ(a.str(), "(5,3)");
}

TEST(EndpointRef, CanonicalFormIsTheShallowestLevel) {
  const EndpointRef deep{{4, 16}, Side::Right};
  EXPECT_EQ(deep.canonical().addr, (IntervalAddress{0, 1}));
  const EndpointRef mid{{3, 3}, Side::Left};
  EXPECT_EQ(mid.canonical().addr, (IntervalAddress{2, 2}));
  EXPECT_EQ(mid.at_level(5).addr, (IntervalAddress{5, 9}));
  EXPECT_EQ(mid.at_level(5).canonical(), mid.canonical());
}

TEST(Locate, Examples) {
  // 1/27 is the right endpoint of I_{1,3} = [0, 1/27].
  EXPECT_EQ(locate<Rational>(kTernary, Rational(1, 27), 3), (IntervalAddress{3, 1}));
  EXPECT_EQ(locate<Rational>(kTernary, Rational(1, 2), 1), std::nullopt);
  EXPECT_EQ(locate<Rational>(kSquare, Rational(0), 5), (IntervalAddress{5, 1}));
  EXPECT_EQ(locate<Rational>(kTernary, Rational(2), 1), std::nullopt);
}

TEST(Locate, MidpointsAndEndpoints) {
  for (const auto& d : {kTernary, kSquare}) {
    for (int s = 0; s <= 4; ++s) {
      for (std::uint64_t j = 1; j <= (std::uint64_t{1} << s); ++j) {
        const auto iv = interval<Rational>(d, {s, j});
        const Rational mid = (iv.left + iv.right) / 2;
        EXPECT_EQ(locate<Rational>(d, mid, s), (IntervalAddress{s, j}));
        EXPECT_EQ(locate<Rational>(d, mid, s + 1), std::nullopt);
        EXPECT_EQ(locate<Rational>(d, iv.left, s + 3), (IntervalAddress{s, j}.left_child().left_child().left_child()));
        EXPECT_EQ(locate<Rational>(d, iv.right, s + 2), (IntervalAddress{s, j}.right_child().right_child()));
      }
    }
  }
}

TEST(Locate, SlackAbsorbsRounding) {
  const PrecisionScope scope(128);
  const BigReal ninth(Rational(1, 9));
  const BigReal above = ninth + ldexp(BigReal(1), -126);
  EXPECT_EQ(locate<BigReal>(kTernary, above, 2), std::nullopt);
  EXPECT_EQ(locate<BigReal>(kTernary, above, 2, ldexp(BigReal(1), -120)), (IntervalAddress{2, 1}));
}

TEST(Regularity, Examples) {
  EXPECT_TRUE(check_regularity(kSquare, 6));
  EXPECT_TRUE(check_regularity(kTernary, 6));
  EXPECT_TRUE(check_regularity(SetDescriptor::alpha(Rational(3, 2), Rational(1, 9)), 8));
  // (1/100)^2 < (1/3)(1/900).
  const auto irregular =
      SetDescriptor::explicit_lengths({Rational(1), Rational(1, 3), Rational(1, 100), Rational(1, 900)});
  EXPECT_FALSE(check_regularity(irregular, 2));
  const auto regular = SetDescriptor::explicit_lengths({Rational(1), Rational(1, 3), Rational(1, 9), Rational(1, 100)});
  EXPECT_TRUE(check_regularity(regular, 2));
}

TEST(Regularity, ExplicitTableAgreesWithBruteForce) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<Rational> lengths{Rational(1)};
    for (int s = 1; s <= 4; ++s) lengths.push_back(lengths.back() / Rational(static_cast<long>(3 + rng() % 5)));
    const auto d = SetDescriptor::explicit_lengths(lengths);
    bool expected = true;
    for (int s = 1; s <= 2; ++s)
      expected = expected && lengths[s + 1] * lengths[s + 1] >= lengths[s] * lengths[s + 2];
    EXPECT_EQ(check_regularity(d, 3), expected);
  }
}
