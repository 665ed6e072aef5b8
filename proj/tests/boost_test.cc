#include "quasimix/boost.h"

#include <cmath>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "oracles/corpus.h"
#include "oracles/fourier_oracle.h"
#include "oracles/metrics.h"
#include "quasimix/uniformity.h"

namespace quasimix {
namespace {

std::shared_ptr<const SpectralBasis> BasisFor(const std::string& spec) {
  static std::map<std::string, std::shared_ptr<const SpectralBasis>> cache;
  auto& b = cache[spec];
  if (!b) {
    b = MakeSpectralBasis(
        std::make_shared<const IrrepSet>(ComputeIrreps(MakeGroup(GroupSpec::Parse(spec)))));
  }
  return b;
}

ProductGroup SpaceOf(const std::string& spec, int m) {
  return ProductGroup(BasisFor(spec)->irreps().group_ptr(), m);
}

TEST(L2Test, ClosedFormsAndIdentity) {
  for (const std::string spec : {"cyclic:6", "a5", "sl2:3"}) {
    const ProductGroup space = SpaceOf(spec, 1);
    const double n = static_cast<double>(space.size());
    EXPECT_LE(L2SqDistToUniform(Dist::Uniform(space)), 1e-15);
    EXPECT_NEAR(L2SqDistToUniform(Dist::PointMass(space, 0)), 1.0 - 1.0 / n, 1e-12);
    EXPECT_NEAR(TvDistToUniform(Dist::PointMass(space, 0)), 1.0 - 1.0 / n, 1e-12);
  }
  std::mt19937_64 rng(3);
  const ProductGroup space = SpaceOf("sl2:3", 2);
  for (int t = 0; t < 50; ++t) {
    const Dist p(space, oracle::RandomProbabilities(space.size(), rng));
    EXPECT_NEAR(L2SqDistToUniform(p), L2SqViaNorm(p), 1e-12);
  }
}

TEST(L2Test, NumericalFloor) {
  EXPECT_TRUE(AtNumericalFloor(0.0, 100));
  EXPECT_TRUE(AtNumericalFloor(1e-40, 100));
  EXPECT_FALSE(AtNumericalFloor(1e-10, 100));
}

TEST(FlattenTest, UniformIsZero) {
  const auto basis = BasisFor("a5");
  const FlattenRecord r = FlattenBoundCheck(Dist::Uniform(SpaceOf("a5", 2)), 1, 3, basis);
  EXPECT_LE(r.lhs, 1e-20);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.ratio.has_value());
}

TEST(FlattenTest, FactorArithmetic) {
  const auto basis = BasisFor("cyclic:5");
  const ProductGroup space = SpaceOf("cyclic:5", 3);
  const FlattenRecord r = FlattenBoundCheck(Dist::Uniform(space), 2, 1, basis);
  EXPECT_DOUBLE_EQ(r.factor, 2.0 * 5.0);
}

TEST(FlattenTest, PreconditionViolation) {
  const auto basis = BasisFor("cyclic:5");
  const ProductGroup space = SpaceOf("cyclic:5", 3);
  try {
    FlattenBoundCheck(Dist::PointMass(space, 0), 2, 1, basis);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NEAR(e.measured(), 24.0, 1e-12);
  }
}

// (1 - t) u + t q with q exactly (j-1)-uniform, and dense near-uniform
// inputs small enough to satisfy the precondition.
TEST(FlattenTest, SyntheticInstances) {
  std::mt19937_64 rng(5);
  struct Case {
    std::string spec;
    int m, k, d;
  };
  int checked = 0;
  for (const Case& c : {Case{"cyclic:5", 3, 2, 1}, Case{"sl2:3", 2, 1, 1}}) {
    const auto basis = BasisFor(c.spec);
    const ProductGroup space = SpaceOf(c.spec, c.m);
    std::vector<int> coords(c.k + 1);
    for (int i = 0; i <= c.k; ++i) coords[i] = i;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
      const std::vector<double> w = oracle::RandomProbabilities(space.base_order(), rng);
      const Dist q(space, oracle::ProductConstraintDist(space, coords, w));
      const Dist p = Dist::Mix(Dist::Uniform(space), q, unit(rng));
      ASSERT_LE(oracle::EpsKByTuples(space, {p.values().begin(), p.values().end()}, c.k), 1e-12);
      const FlattenRecord r = FlattenBoundCheck(p, c.k, c.d, basis, ConvolutionEngine::kDirect);
      const double lhs_oracle = L2SqDistToUniform(
          Dist(space, oracle::PairConvolution(space, {p.values().begin(), p.values().end()},
                                              {p.values().begin(), p.values().end()})));
      EXPECT_NEAR(r.lhs, lhs_oracle, 1e-15);
      EXPECT_TRUE(r.holds) << c.spec << " lhs=" << r.lhs << " rhs=" << r.rhs;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 20);
}

TEST(SquareBoostTest, UniformAndPointMassMix) {
  const auto basis = BasisFor("a5");
  const ProductGroup space = SpaceOf("a5", 2);
  const Dist u = Dist::Uniform(space);
  const SquareBoostRecord zero = SquareBoostCheck(u, u, 1, basis);
  EXPECT_LE(zero.eps_conv, 1e-12);
  EXPECT_TRUE(zero.holds);

  const Dist p = Dist::Mix(u, Dist::PointMass(space, 0), 1e-3);
  const SquareBoostRecord r = SquareBoostCheck(p, p, 1, basis);
  EXPECT_NEAR(r.eps_p, 1e-3 * 59.0, 1e-12);
  EXPECT_LE(r.eps_conv, r.eps_p * r.eps_p + 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(SquareBoostTest, RandomPairsCyclic) {
  const auto basis = BasisFor("cyclic:5");
  const ProductGroup space = SpaceOf("cyclic:5", 3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 0.5);
  for (int i = 0; i < 50; ++i) {
    const Dist p(space, oracle::NearUniform(space.size(), unit(rng), rng));
    const Dist q(space, oracle::NearUniform(space.size(), unit(rng), rng));
    const SquareBoostRecord r = SquareBoostCheck(p, q, 2, basis);
    const std::vector<double> conv = oracle::PairConvolution(
        space, {p.values().begin(), p.values().end()}, {q.values().begin(), q.values().end()});
    EXPECT_NEAR(r.eps_conv, oracle::EpsKByTuples(space, conv, 2), 1e-10);
    EXPECT_TRUE(r.holds) << r.eps_conv << " > " << r.eps_p << " * " << r.eps_q;
  }
}

TEST(SquareBoostTest, SpaceMismatch) {
  const auto basis = BasisFor("cyclic:5");
  EXPECT_THROW(SquareBoostCheck(Dist::Uniform(SpaceOf("cyclic:5", 2)),
                                Dist::Uniform(SpaceOf("cyclic:5", 3)), 1, basis),
               std::invalid_argument);
}

TEST(LinfTest, PointMassEquality) {
  for (const std::string spec : {"sl2:5", "a5"}) {
    const auto basis = BasisFor(spec);
    const ProductGroup space = SpaceOf(spec, 1);
    const double n = static_cast<double>(space.size());
    const LinfRecord r = L2ToLinfCheck(Dist::PointMass(space, 0), basis);
    EXPECT_NEAR(r.linf, 1.0 - 1.0 / n, 1e-12);
    EXPECT_NEAR(r.l2sq, 1.0 - 1.0 / n, 1e-12);
    EXPECT_TRUE(r.holds);
  }
}

TEST(LinfTest, RandomSl2Five) {
  const auto basis = BasisFor("sl2:5");
  const ProductGroup space = SpaceOf("sl2:5", 1);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Dist p(space, i % 2 ? oracle::RandomProbabilities(space.size(), rng)
                              : oracle::SparseProbabilities(space.size(), 1 + i % 7, rng));
    const LinfRecord r = L2ToLinfCheck(p, basis);
    EXPECT_TRUE(r.holds) << r.linf << " > " << r.l2sq;
  }
}

TEST(BoostModeTest, Names) {
  EXPECT_EQ(ToString(BoostMode::kSelfSquare), "self-square");
  EXPECT_EQ(ParseBoostMode("fresh-copy"), BoostMode::kFreshCopy);
  EXPECT_THROW(ParseBoostMode("square"), std::invalid_argument);
}

TEST(PipelineTest, UniformStopsAtStepZero) {
  const ProductGroup space = SpaceOf("a5", 2);
  BoostConfig config;
  config.target_eps = 1e-10;
  const BoostResult r = BoostPipeline(Dist::Uniform(space), config, BasisFor("a5"));
  EXPECT_TRUE(r.reached_target);
  EXPECT_EQ(r.steps, 0);
  ASSERT_EQ(r.log.steps().size(), 1u);
  EXPECT_EQ(r.log.steps()[0].step, 0);
}

TEST(PipelineTest, FreshCopyMatchesTFoldOracle) {
  const auto basis = BasisFor("sl2:3");
  const ProductGroup space = SpaceOf("sl2:3", 3);
  std::mt19937_64 rng(13);
  const std::vector<double> p0 = oracle::SparseProbabilities(space.size(), 40, rng);
  const Dist p(space, p0);
  BoostConfig config;
  config.mode = BoostMode::kFreshCopy;
  config.max_steps = 7;
  config.engine = ConvolutionEngine::kFourier;
  const BoostResult r = BoostPipeline(p, config, basis);
  ASSERT_EQ(r.steps, 7);
  EXPECT_EQ(r.copies, 8u);
  const std::vector<double> oracle8 = oracle::TFold(space, p0, 8);
  double worst = 0.0;
  for (std::size_t x = 0; x < oracle8.size(); ++x)
    worst = std::max(worst, std::abs(oracle8[x] - r.final[x]));
  EXPECT_LE(worst, 1e-9);
  EXPECT_NEAR(r.log.steps().back().linf_rel, oracle::RelLinf(oracle8), 1e-9 * space.size());
}

TEST(PipelineTest, SelfSquareEnginesAgree) {
  const auto basis = BasisFor("sl2:3");
  const ProductGroup space = SpaceOf("sl2:3", 2);
  std::mt19937_64 rng(17);
  const Dist p(space, oracle::SparseProbabilities(space.size(), 10, rng));
  BoostConfig config;
  config.max_steps = 4;
  config.ks = {1, 2};
  config.engine = ConvolutionEngine::kFourier;
  const BoostResult f = BoostPipeline(p, config, basis);
  config.engine = ConvolutionEngine::kDirect;
  const BoostResult d = BoostPipeline(p, config, basis);
  ASSERT_EQ(f.steps, d.steps);
  EXPECT_EQ(f.copies, 16u);
  for (std::size_t x = 0; x < space.size(); ++x) EXPECT_NEAR(f.final[x], d.final[x], 1e-12);
  for (std::size_t t = 1; t < f.log.steps().size(); ++t) {
    const double prev = f.log.steps()[t - 1].l2_sq, cur = f.log.steps()[t].l2_sq;
    if (!AtNumericalFloor(prev, space.size())) EXPECT_LT(cur, prev);
  }
}

TEST(PipelineTest, CsvIsDeterministic) {
  const auto basis = BasisFor("sl2:3");
  const ProductGroup space = SpaceOf("sl2:3", 2);
  auto run = [&] {
    std::mt19937_64 rng(21);
    const Dist p(space, oracle::RandomProbabilities(space.size(), rng));
    BoostConfig config;
    config.max_steps = 3;
    config.ks = {1, 2};
    return BoostPipeline(p, config, basis).log.ToCsv();
  };
  const std::string a = run();
  EXPECT_EQ(a, run());
  EXPECT_EQ(a.substr(0, a.find('\n')), "step,mode,l2_sq,linf_rel,eps_k1,eps_k2,tv_dist,seconds");
}

}  // namespace
}  // namespace quasimix
