#include <gtest/gtest.h>

#include <cmath>

#include "cantorlc/cantorlc.hpp"

using namespace cantorlc;

namespace {

const SetDescriptor kTernary = SetDescriptor::beta(Rational(1, 3));
const GammaSequence kGeom = GammaSequence::geometric(Rational(1, 32), Rational(1, 2));
const GammaSequence kSingle = GammaSequence::table({Rational(1, 32)});

PrecisionContext ctx_bits(int bits) {
  PrecisionContext c;
  c.bits = bits;
  return c;
}

double rel(const BigReal& a, const BigReal& b) { return std::fabs(((a - b) / b).to_double()); }

}  // namespace

TEST(LemmaY, LevelThreeMatchesRationalOracle) {
  const auto ctx = ctx_bits(256);
  const auto r = lemma_Y_bound(kTernary, 3, ctx);
  Rational q = Rational(26, 27) / Rational(7, 9);
  const Rational exact = Rational(1, 27) * q * q * q * q;
  const auto scope = ctx.scope();
  EXPECT_LT(rel(r.value, BigReal(exact)), 1e-60);
  EXPECT_NEAR(r.value.to_double(), 0.08703, 5e-6);
  EXPECT_EQ(r.side, BoundSide::LowerBoundForLambda);
  EXPECT_EQ(r.name, "lemma_Y");
}

TEST(LemmaY, LevelEightAndDominance) {
  const auto ctx = ctx_bits(256);
  const auto lemma = lemma_Y_bound(kTernary, 8, ctx);
  const auto theorem = theorem_beta_bound(Rational(1, 3), 8, ctx);
  EXPECT_NEAR(std::log10(lemma.value.to_double()), std::log10(4.74e18), 0.01);
  EXPECT_GT(lemma.value, theorem.value);
  for (int s = 3; s <= 10; ++s)
    EXPECT_GE(lemma_Y_bound(kTernary, s, ctx).value, theorem_beta_bound(Rational(1, 3), s, ctx).value) << s;
}

TEST(LemmaY, Errors) {
  EXPECT_THROW(lemma_Y_bound(kTernary, 2), DomainError);
  EXPECT_THROW(lemma_Y_bound(SetDescriptor::julia(kGeom), 4), DomainError);
}

TEST(TheoremBeta, Examples) {
  const auto ctx = ctx_bits(256);
  const auto scope = ctx.scope();
  const Rational q(9, 8);
  EXPECT_LT(rel(theorem_beta_bound(Rational(1, 3), 3, ctx).value, BigReal(Rational(1, 27) * q * q * q * q)), 1e-60);
  EXPECT_NEAR(theorem_beta_bound(Rational(1, 3), 3, ctx).value.to_double(), 0.0593, 5e-5);
  EXPECT_NEAR(theorem_beta_bound(Rational(1, 3), 8, ctx).value.to_double(), 5.4e2, 5.0);
  EXPECT_THROW(theorem_beta_bound(Rational(1, 2), 3), DomainError);
  EXPECT_THROW(theorem_beta_bound(Rational(1, 3), 2), DomainError);
}

TEST(Mergelyan, LeadingTermAndGrowth) {
  const auto ctx = ctx_bits(256);
  const auto d = SetDescriptor::beta(Rational(1, 9));
  const auto m5 = mergelyan_Ms(d, 5, ctx);
  EXPECT_NEAR(m5.leading_term.to_double(), 64 * 6 * std::log(4.5), 1e-9);
  EXPECT_NEAR(m5.leading_term.to_double(), 577.6, 0.05);
  EXPECT_GT(m5.log_Ms, BigReal(0));
  const double ratio = (m5.log_Ms / m5.leading_term).to_double();
  EXPECT_GT(ratio, 0.5);
  EXPECT_LT(ratio, 2.0);
  for (int s = 4; s < 8; ++s) EXPECT_LT(mergelyan_Ms(d, s, ctx).log_Ms, mergelyan_Ms(d, s + 1, ctx).log_Ms) << s;
}

TEST(Mergelyan, SmallCaseAgainstExactFactorial) {
  // s = 1: M_1 = 2^5 l_3 / (4! l_2^4) with beta = 1/9.
  const auto ctx = ctx_bits(256);
  const auto scope = ctx.scope();
  const Rational l2 = Rational(1, 81);
  const Rational exact = Rational(32) * Rational(1, 729) / (Rational(24) * l2 * l2 * l2 * l2);
  const auto m1 = mergelyan_Ms(SetDescriptor::beta(Rational(1, 9)), 1, ctx);
  EXPECT_LT(std::fabs((m1.log_Ms - log(BigReal(exact))).to_double()), 1e-60);
}

TEST(Mergelyan, Errors) {
  EXPECT_THROW(mergelyan_Ms(kTernary, 5), DomainError);
  EXPECT_THROW(mergelyan_Ms(SetDescriptor::alpha(Rational(2), Rational(1, 3)), 5), DomainError);
}

TEST(LemmaSum, Constants) {
  EXPECT_EQ(sum_constants(Rational(2)), (std::pair<int, int>{7, 4}));
  EXPECT_EQ(sum_constants(Rational(3)), (std::pair<int, int>{7, 4}));
  EXPECT_EQ(sum_constants(Rational(3, 2)), (std::pair<int, int>{5, 5}));
}

TEST(LemmaSum, SquaredSetPasses) {
  const auto r = lemma_sum_check(Rational(2), Rational(1, 3), 20, ctx_bits(256));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.side, BoundSide::InequalityCheck);
  // Rows: 21 against C, 17 against 2.
  EXPECT_EQ(r.rows.size(), 21u + 17u);
  EXPECT_GT(r.worst_margin(), 0.0);
  // n = 0 is a single term: A_0 = 1, i.e. 3 <= 21 after scaling by 1/h_0.
  ASSERT_EQ(r.rows[0].index, 0);
  EXPECT_LT(rel(r.rows[0].lhs, BigReal(1)), 1e-60);
  EXPECT_EQ(compare(r.rows[0].rhs, BigReal(7)), 0);
}

TEST(LemmaSum, FractionalAlphaPasses) {
  const auto r = lemma_sum_check(Rational(3, 2), Rational(1, 9), 20, ctx_bits(256));
  EXPECT_TRUE(r.pass);
  bool saw_two = false;
  for (const auto& row : r.rows)
    if (row.label == "2") {
      EXPECT_GE(row.index, 5);
      saw_two = true;
    }
  EXPECT_TRUE(saw_two);
}

TEST(LemmaSum, AgreesWithExactSumsAtSmallN) {
  const auto r = lemma_sum_check(Rational(2), Rational(1, 3), 4, ctx_bits(256));
  const auto d = SetDescriptor::alpha(Rational(2), Rational(1, 3));
  const auto scope = ctx_bits(256).scope();
  for (int n = 0; n <= 4; ++n) {
    Rational a(0);
    const Rational hn = gap<Rational>(d, n);
    for (int k = 0; k <= n; ++k) {
      Rational t = hn / gap<Rational>(d, k);
      for (int i = k; i < n; ++i) t *= 2;
      a += t;
    }
    EXPECT_LT(rel(r.rows[static_cast<std::size_t>(n)].lhs, BigReal(a)), 1e-60) << n;
  }
}

TEST(LemmaLlh, SquaredAndCubedSetsPass) {
  const auto two = lemma_llh_check(Rational(2), Rational(1, 3), 10);
  EXPECT_TRUE(two.pass);
  EXPECT_EQ(two.rows.size(), 18u);
  const auto three = lemma_llh_check(Rational(3), Rational(1, 3), 8);
  EXPECT_TRUE(three.pass);
}

TEST(LemmaLlh, SquaredTernaryIsTight) {
  // With l_k = 3^(-2^(k-1)) both sides agree exactly, e.g. at k = 2
  // l_2 / h_1 = (1/9) / (1/9) = 1 = (3 - 2)^(-1) and l_2 / h_2 = 9/7 = 1 + 2/7.
  const auto r = lemma_llh_check(Rational(2), Rational(1, 3), 6);
  ASSERT_EQ(r.rows.size(), 10u);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.holds) << row.label << " k=" << row.index;
    EXPECT_TRUE(row.equality) << row.label << " k=" << row.index;
  }
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.note, "10 row(s) hold with equality");
}

TEST(LemmaLlh, SmallerFirstLengthIsStrict) {
  const auto r = lemma_llh_check(Rational(2), Rational(1, 4), 6);
  EXPECT_TRUE(r.pass);
  for (const auto& row : r.rows) {
    EXPECT_FALSE(row.equality) << row.label << " k=" << row.index;
    EXPECT_GT(row.margin, 0.0);
  }
  EXPECT_TRUE(r.note.empty());
}

TEST(LemmaLlh, FractionalAlphaUsesLogDomain) {
  const auto r = lemma_llh_check(Rational(3, 2), Rational(1, 9), 12, ctx_bits(256));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.rows.size(), 22u);
  EXPECT_THROW(lemma_llh_check(Rational(2), Rational(1, 3), 1), DomainError);
}

TEST(Bdd2, Examples) {
  const auto ctx = ctx_bits(256);
  const auto a = bdd2_bound(kGeom, ctx);
  EXPECT_NEAR(a.value.to_double(), 1 + 4 * std::exp(1.0) / 105, 1e-15);
  EXPECT_NEAR(a.value.to_double(), 1.10355, 5e-6);
  EXPECT_EQ(a.side, BoundSide::UpperBoundForLambda);
  const auto b = bdd2_bound(kSingle, ctx);
  EXPECT_NEAR(b.value.to_double(), 1 + 4 * std::exp(0.5) / 105, 1e-15);
  EXPECT_NEAR(b.value.to_double(), 1.062808, 5e-7);
  EXPECT_TRUE(b.satisfied_by(BigReal(1)));
  EXPECT_FALSE(b.satisfied_by(BigReal(2)));
  EXPECT_THROW(bdd2_bound(GammaSequence::table({Rational(1, 16)})), DomainError);
}

TEST(NotBdd, Examples) {
  const auto ctx = ctx_bits(256);
  const auto scope = ctx.scope();
  const BigReal e = exp(BigReal(1));
  EXPECT_LT(rel(notbdd_bound(kGeom, 15, ctx).value, 13 / e), 1e-60);
  EXPECT_NEAR(notbdd_bound(kGeom, 15, ctx).value.to_double(), 4.78243, 5e-6);
  EXPECT_LT(rel(notbdd_bound(kGeom, 3, ctx).value, 1 / c0_constant(kGeom, ctx)), 1e-60);
  EXPECT_LT(rel(notbdd_bound(kSingle, 31, ctx).value, 29 / sqrt(e)), 1e-60);
  EXPECT_NEAR(notbdd_bound(kSingle, 31, ctx).value.to_double(), 17.59, 5e-3);
  EXPECT_EQ(notbdd_bound(kSingle, 31, ctx).side, BoundSide::LowerBoundForLambda);
  EXPECT_THROW(notbdd_bound(kGeom, 2), DomainError);
}

TEST(BoundSide, Names) {
  EXPECT_EQ(to_string(BoundSide::LowerBoundForLambda), "lower");
  EXPECT_EQ(to_string(BoundSide::UpperBoundForLambda), "upper");
  EXPECT_EQ(to_string(BoundSide::InequalityCheck), "check");
}
