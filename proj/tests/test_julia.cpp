#include <gtest/gtest.h>

#include <cmath>

#include "cantorlc/cantorlc.hpp"

using namespace cantorlc;

namespace {

const GammaSequence kGeom = GammaSequence::geometric(Rational(1, 32), Rational(1, 2));

PrecisionContext context_for(const GammaSequence& g, int s) {
  return make_context(SetDescriptor::julia(g), s, std::size_t{2} << s, 40);
}

}  // namespace

TEST(Gamma, RejectsOutOfRangeEntries) {
  EXPECT_THROW(GammaSequence::table({Rational(1, 5)}), DomainError);
  EXPECT_THROW(GammaSequence::table({Rational(0)}), DomainError);
  EXPECT_THROW(GammaSequence::table({}), DomainError);
  EXPECT_THROW(GammaSequence::geometric(Rational(1, 32), Rational(1)), DomainError);
  EXPECT_THROW(SetDescriptor::parse("julia:table:0.2"), DomainError);
  EXPECT_NO_THROW(GammaSequence::table({Rational(1, 32), Rational(1, 1000)}));
}

TEST(Gamma, SumsAndIndices) {
  EXPECT_EQ(kGeom.gamma(3), Rational(1, 128));
  EXPECT_EQ(kGeom.total_sum(), Rational(1, 16));
  EXPECT_EQ(kGeom.tail_sum(2), Rational(1, 64));
  const auto t = GammaSequence::table({Rational(1, 32), Rational(1, 64)});
  EXPECT_EQ(t.gamma(3), Rational(0));
  EXPECT_EQ(t.last_index(), 2);
  EXPECT_EQ(t.total_sum(), Rational(3, 64));
  EXPECT_THROW(t.gamma(0), DomainError);
}

TEST(RSequence, RecurrenceInRationals) {
  const auto r = r_sequence<Rational>(kGeom, 3);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0], Rational(1));
  EXPECT_EQ(r[1], Rational(1, 32));
  EXPECT_EQ(r[2], Rational(1, 64) * Rational(1, 1024));
  EXPECT_EQ(r[3], Rational(1, 128) * r[2] * r[2]);
  EXPECT_EQ(delta<Rational>(kGeom, 3), Rational(1, 32 * 64 * 128));
}

TEST(EvalP, Examples) {
  const auto a = eval_P<Rational>(kGeom, 1, Rational(0));
  EXPECT_EQ(a.first, Rational(0));
  EXPECT_EQ(a.second, Rational(-1));
  const auto b = eval_P<Rational>(kGeom, 2, Rational(1, 2));
  EXPECT_EQ(b.first, Rational(7, 128));
  EXPECT_EQ(b.second, Rational(0));
  const auto c = eval_P<Rational>(kGeom, 2, Rational(1));
  EXPECT_EQ(c.first, Rational(0));
  EXPECT_EQ(c.second, Rational(1, 32));
  EXPECT_THROW(eval_P<Rational>(kGeom, 0, Rational(0)), DomainError);
}

TEST(EvalP, DerivativeMatchesDifferenceQuotient) {
  const PrecisionScope scope(256);
  const BigReal h = ldexp(BigReal(1), -90);
  for (double x : {0.01, 0.3, 0.77, 0.999}) {
    const BigReal bx(x);
    const auto [p, dp] = eval_P<BigReal>(kGeom, 4, bx);
    const BigReal fd = (eval_P<BigReal>(kGeom, 4, bx + h).first - eval_P<BigReal>(kGeom, 4, bx - h).first) / (2 * h);
    EXPECT_LT(abs(fd - dp).to_double(), 1e-40) << x;
  }
}

TEST(BuildLevels, LevelZeroIsTheUnitInterval) {
  const auto c = build_levels(kGeom, 0, context_for(kGeom, 0));
  ASSERT_EQ(c.levels.size(), 1u);
  ASSERT_EQ(c.level(0).intervals.size(), 1u);
  EXPECT_TRUE(c.level(0).intervals[0].left.is_zero());
  EXPECT_EQ(compare(c.level(0).intervals[0].right, BigReal(1)), 0);
}

TEST(BuildLevels, LevelOneEndpointsAreClosedForm) {
  const auto ctx = context_for(kGeom, 1);
  const auto c = build_levels(kGeom, 1, ctx);
  const auto scope = ctx.scope();
  const auto& iv = c.level(1).intervals;
  ASSERT_EQ(iv.size(), 2u);
  const BigReal root = sqrt(BigReal(Rational(7, 8)));
  const BigReal a = (1 - root) / 2;
  const BigReal b = (1 + root) / 2;
  const BigReal tol = ldexp(BigReal(1), -(ctx.bits - 8));
  EXPECT_LT(abs(iv[0].left), tol);
  EXPECT_LT(abs(iv[0].right - a), tol);
  EXPECT_LT(abs(iv[1].left - b), tol);
  EXPECT_LT(abs(iv[1].right - 1), tol);
  EXPECT_NEAR(a.to_double(), 0.0322928266, 1e-10);
}

TEST(BuildLevels, ConstantGammaLengthsAtLevelTwo) {
  const auto g = GammaSequence::table({Rational(1, 32), Rational(1, 32)});
  const auto ctx = context_for(g, 2);
  const auto c = build_levels(g, 2, ctx);
  const auto scope = ctx.scope();
  const BigReal d2(Rational(1, 1024));
  const BigReal upper = c0_constant(g, ctx) * d2;
  const auto& lv = c.level(2);
  ASSERT_EQ(lv.intervals.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_GT(lv.length(j), d2) << j;
    EXPECT_LT(lv.length(j), upper) << j;
  }
}

TEST(BuildLevels, EndpointsAreRootsAndIntervalsAreOrdered) {
  const int s_max = 5;
  const auto ctx = context_for(kGeom, s_max);
  const auto c = build_levels(kGeom, s_max, ctx);
  const auto scope = ctx.scope();
  const BigReal tol = ldexp(BigReal(1), -(ctx.bits - 16));
  for (int s = 1; s <= s_max; ++s) {
    const auto& iv = c.level(s).intervals;
    ASSERT_EQ(iv.size(), std::size_t{1} << s);
    for (std::size_t j = 0; j < iv.size(); ++j) {
      EXPECT_LT(iv[j].left, iv[j].right);
      if (j + 1 < iv.size()) {
        EXPECT_LT(iv[j].right, iv[j + 1].left);
      }
      EXPECT_LT(abs(eval_P(kGeom, s + 1, iv[j].left).first), tol);
      EXPECT_LT(abs(eval_P(kGeom, s + 1, iv[j].right).first), tol);
    }
  }
}

TEST(BuildLevels, BudgetLimits) {
  const auto t = GammaSequence::table({Rational(1, 32)});
  EXPECT_THROW(build_levels(t, 2, context_for(t, 1)), BudgetError);
  EXPECT_THROW(build_levels(kGeom, 25, context_for(kGeom, 1)), BudgetError);
  EXPECT_THROW(build_levels(kGeom, -1, context_for(kGeom, 1)), DomainError);
}

TEST(C0, ClosedForms) {
  const auto ctx = context_for(kGeom, 1);
  const auto scope = ctx.scope();
  const BigReal e = exp(BigReal(1));
  const BigReal tol = ldexp(BigReal(1), -(ctx.bits - 8));
  EXPECT_LT(abs(c0_constant(kGeom, ctx) - e), tol * e);
  const BigReal half = c0_constant(GammaSequence::table({Rational(1, 32)}), ctx);
  EXPECT_LT(abs(half - sqrt(e)), tol * e);
  const BigReal three_halves = c0_constant(GammaSequence::geometric(Rational(1, 32), Rational(2, 3)), ctx);
  EXPECT_LT(abs(three_halves - e * sqrt(e)), tol * e * e);
}

TEST(VerifyJulia, AllInvariantsHoldThroughLevelFour) {
  for (const auto& g : {kGeom, GammaSequence::table({Rational(1, 32), Rational(1, 32), Rational(1, 32), Rational(1, 32)}),
                        GammaSequence::geometric(Rational(1, 100), Rational(1, 3))}) {
    const auto c = build_levels(g, 4, context_for(g, 4));
    const auto report = verify_julia_invariants(c);
    EXPECT_TRUE(report.all_pass()) << g.canonical();
    for (const auto& e : report.entries) {
      EXPECT_TRUE(e.pass) << g.canonical() << " " << e.name << " level " << e.level << " margin " << e.worst_margin;
      EXPECT_GT(e.checked, 0);
    }
  }
}

TEST(VerifyJulia, LevelZeroIsVacuous) {
  const auto c = build_levels(kGeom, 0, context_for(kGeom, 0));
  const auto report = verify_julia_invariants(c);
  EXPECT_TRUE(report.all_pass());
  for (const auto& e : report.entries) EXPECT_EQ(e.level, 0);
}
