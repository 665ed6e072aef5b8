#include "quasimix/fourier.h"

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "oracles/fourier_oracle.h"

namespace quasimix {
namespace {

std::shared_ptr<const SpectralBasis> BasisFor(const std::string& spec) {
  static std::map<std::string, std::shared_ptr<const SpectralBasis>> cache;
  auto it = cache.find(spec);
  if (it != cache.end()) return it->second;
  auto irreps = std::make_shared<const IrrepSet>(ComputeIrreps(MakeGroup(GroupSpec::Parse(spec))));
  auto basis = MakeSpectralBasis(irreps);
  cache[spec] = basis;
  return basis;
}

ProductGroup SpaceOf(const SpectralBasis& b, int m) {
  return ProductGroup(b.irreps().group_ptr(), m);
}

double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ComplexMatrix RandomMatrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

const std::vector<std::string> kGroups = {"cyclic:4", "cyclic:12", "a5", "sl2:3", "sl2:5"};

TEST(FrobeniusTest, NormFormulas) {
  EXPECT_DOUBLE_EQ(FrobeniusNormSq(ComplexMatrix::Identity(3, 3)), 3.0);
  EXPECT_EQ(FrobeniusNormSq(ComplexMatrix::Zero(4, 4)), 0.0);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const ComplexMatrix a = RandomMatrix(4, rng), b = RandomMatrix(4, rng);
    EXPECT_NEAR(FrobeniusNormSq(a), FrobeniusNormSqTrace(a), 1e-12 * FrobeniusNormSq(a));
    EXPECT_LE(FrobeniusNormSq(a * b), FrobeniusNormSq(a) * FrobeniusNormSq(b));
  }
}

TEST(FourierTest, UniformAndPointMassCoefficients) {
  for (const auto& spec : kGroups) {
    const auto basis = BasisFor(spec);
    const int n = basis->order();
    const ProductGroup space = SpaceOf(*basis, 1);
    const FourierData u = FourierForward(Dist::Uniform(space).values(), basis);
    const FourierData e = FourierForward(Dist::PointMass(space, 0).values(), basis);
    for (int r = 0; r < basis->num_irreps(); ++r) {
      const std::vector<int> idx = {r};
      const int d = basis->dim(r);
      const ComplexMatrix expected_u =
          r == 0 ? ComplexMatrix::Constant(1, 1, 1.0 / n) : ComplexMatrix::Zero(d, d);
      EXPECT_LE((u.Coefficient(idx) - expected_u).cwiseAbs().maxCoeff(), 1e-12) << spec;
      const ComplexMatrix expected_e = ComplexMatrix::Identity(d, d) / static_cast<double>(n);
      EXPECT_LE((e.Coefficient(idx) - expected_e).cwiseAbs().maxCoeff(), 1e-15) << spec;
    }
    const std::vector<Complex> back = FourierInverse(u);
    for (const Complex& v : back) EXPECT_NEAR(std::abs(v - 1.0 / n), 0.0, 1e-14);
  }
}

TEST(FourierTest, ParsevalAndRoundTripOnEveryGroup) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (const auto& spec : kGroups) {
    const auto basis = BasisFor(spec);
    const int n = basis->order();
    for (int t = 0; t < 100; ++t) {
      std::vector<Complex> f(n);
      for (auto& v : f) v = Complex(g(rng), g(rng));
      const FourierData c = FourierForward(f, basis);
      double lhs = 0.0;
      for (const auto& v : f) lhs += std::norm(v);
      lhs /= n;
      double rhs = 0.0;
      for (int r = 0; r < basis->num_irreps(); ++r)
        rhs += basis->dim(r) * FrobeniusNormSq(c.Coefficient(std::vector<int>{r}));
      ASSERT_LE(std::abs(lhs - rhs), 1e-10 * lhs) << spec;
      const std::vector<Complex> back = FourierInverse(c);
      double err = 0.0;
      for (int x = 0; x < n; ++x) err = std::max(err, std::abs(back[x] - f[x]));
      ASSERT_LE(err, 1e-10) << spec;
    }
  }
}

TEST(FourierTest, MatchesDirectSummationOnAlt5) {
  const auto basis = BasisFor("a5");
  const ProductGroup space = SpaceOf(*basis, 1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<Complex> f(60);
  for (auto& v : f) v = Complex(g(rng), g(rng));
  const FourierData c = FourierForward(f, basis);
  std::vector<ComplexMatrix> coeff;
  for (int r = 0; r < basis->num_irreps(); ++r) {
    const ComplexMatrix naive = oracle::NaiveCoefficient(basis->irreps(), space, f, {r});
    EXPECT_LE((c.Coefficient(std::vector<int>{r}) - naive).cwiseAbs().maxCoeff(), 1e-13);
    coeff.push_back(RandomMatrix(basis->dim(r), rng));
  }
  // Reverse direction from arbitrary coefficients.
  const std::vector<Complex> h = oracle::NaiveInverse(basis->irreps(), space, coeff);
  FourierData given(basis, 1, std::vector<Complex>(60));
  for (int r = 0; r < basis->num_irreps(); ++r) given.SetCoefficient(std::vector<int>{r}, coeff[r]);
  const std::vector<Complex> fast = FourierInverse(given);
  for (int x = 0; x < 60; ++x) EXPECT_LE(std::abs(fast[x] - h[x]), 1e-10);
  const FourierData again = FourierForward(h, basis);
  for (int r = 0; r < basis->num_irreps(); ++r)
    EXPECT_LE((again.Coefficient(std::vector<int>{r}) - coeff[r]).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProductFourierTest, ArityOneIsTheBaseTransform) {
  const auto basis = BasisFor("sl2:5");
  std::mt19937_64 rng(3);
  const std::vector<double> f = oracle::RandomProbabilities(120, rng);
  const FourierData a = FourierForward(f, basis);
  const FourierData b = ProductFourierForward(f, 1, basis);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.data()[i], b.data()[i]);
}

class ProductOracleTest : public ::testing::TestWithParam<std::string> {};

TEST_P(ProductOracleTest, AgreesWithGenericProductTransform) {
  const auto basis = BasisFor(GetParam());
  const ProductGroup space = SpaceOf(*basis, 2);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::vector<Complex> f(space.size());
  for (auto& v : f) v = Complex(g(rng), g(rng));
  const FourierData c = ProductFourierForward(f, 2, basis);
  EXPECT_EQ(c.StorageCount(), space.size());
  // Spot-check every product irrep whose dims multiply to at most 9 plus the
  // largest one; the oracle costs |H|^2 Kronecker products per coefficient.
  for (const auto& idx : oracle::AllProductIndices(basis->num_irreps(), 2)) {
    const int d = c.CoefficientDim(idx);
    const bool largest = idx[0] == basis->num_irreps() - 1 && idx[1] == idx[0];
    if (d > 9 && !largest) continue;
    const ComplexMatrix naive = oracle::NaiveCoefficient(basis->irreps(), space, f, idx);
    ASSERT_LE((c.Coefficient(idx) - naive).cwiseAbs().maxCoeff(), 1e-9)
        << idx[0] << "," << idx[1];
  }
}

TEST_P(ProductOracleTest, TensorProductFunctionsFactor) {
  const auto basis = BasisFor(GetParam());
  const int n = basis->order();
  const ProductGroup space = SpaceOf(*basis, 2);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  std::vector<Complex> a(n), b(n), f(space.size());
  for (auto& v : a) v = Complex(g(rng), g(rng));
  for (auto& v : b) v = Complex(g(rng), g(rng));
  // f(x0, x1) = a(x0) b(x1).
  for (int x1 = 0; x1 < n; ++x1)
    for (int x0 = 0; x0 < n; ++x0) f[x0 + n * x1] = a[x0] * b[x1];
  const FourierData fa = FourierForward(a, basis), fb = FourierForward(b, basis);
  const FourierData ff = ProductFourierForward(f, 2, basis);
  for (const auto& idx : oracle::AllProductIndices(basis->num_irreps(), 2)) {
    const ComplexMatrix ca = fa.Coefficient(std::vector<int>{idx[0]});
    const ComplexMatrix cb = fb.Coefficient(std::vector<int>{idx[1]});
    ComplexMatrix kron(cb.rows() * ca.rows(), cb.cols() * ca.cols());
    for (Eigen::Index i = 0; i < cb.rows(); ++i)
      for (Eigen::Index j = 0; j < cb.cols(); ++j)
        kron.block(i * ca.rows(), j * ca.cols(), ca.rows(), ca.cols()) = cb(i, j) * ca;
    ASSERT_LE((ff.Coefficient(idx) - kron).cwiseAbs().maxCoeff(), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Groups, ProductOracleTest, ::testing::Values("cyclic:3", "a5"),
                         [](const auto& info) {
                           std::string s = info.param;
                           std::replace(s.begin(), s.end(), ':', '_');
                           return s;
                         });

TEST(ProductFourierTest, RoundTripAndParsevalUpToArityThree) {
  std::mt19937_64 rng(99);
  for (const auto& spec : kGroups) {
    const auto basis = BasisFor(spec);
    for (int m = 1; m <= 3; ++m) {
      const ProductGroup space = SpaceOf(*basis, m);
      const std::vector<double> f = oracle::RandomProbabilities(space.size(), rng);
      const FourierData c = ProductFourierForward(f, m, basis);
      EXPECT_EQ(c.StorageCount(), space.size());
      double lhs = 0.0;
      for (double v : f) lhs += v * v;
      lhs /= static_cast<double>(space.size());
      double rhs = 0.0;
      ForEachBlock(*basis, m, [&](const BlockLayout& b) {
        double sq = 0.0;
        for (std::size_t r : b.row)
          for (std::size_t col : b.col) sq += std::norm(c.data()[b.base + r + col]);
        rhs += static_cast<double>(b.row.size()) * sq;
      });
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * lhs) << spec << "^" << m;
      double imag = 1.0;
      const std::vector<double> back = ProductFourierInverseReal(c, &imag);
      EXPECT_LE(MaxAbsDiff(back, f), 1e-10) << spec << "^" << m;
      EXPECT_LE(imag, 1e-12);
      const std::vector<Complex> back_c = ProductFourierInverse(c);
      for (std::size_t i = 0; i < f.size(); ++i) ASSERT_LE(std::abs(back_c[i] - f[i]), 1e-10);
    }
  }
}

TEST(ProductFourierTest, RejectsMismatchedInput) {
  const auto basis = BasisFor("cyclic:4");
  EXPECT_THROW(ProductFourierForward(std::vector<double>(15), 2, basis), std::invalid_argument);
  const auto other = BasisFor("sl2:3");
  const ProductGroup space = SpaceOf(*basis, 1);
  const Dist u = Dist::Uniform(space);
  EXPECT_THROW(ConvolveFourier(u, u, other), std::invalid_argument);
}

TEST(ConvolutionTest, PointMassesMultiply) {
  const auto basis = BasisFor("sl2:3");
  const ProductGroup space = SpaceOf(*basis, 2);
  const std::size_t a = 17, b = 301;
  const Dist d = ConvolveDirect(Dist::PointMass(space, a), Dist::PointMass(space, b));
  EXPECT_EQ(d[space.Multiply(a, b)], 1.0);
  const Dist f = ConvolveFourier(Dist::PointMass(space, a), Dist::PointMass(space, b), basis);
  EXPECT_NEAR(f[space.Multiply(a, b)], 1.0, 1e-12);
}

TEST(ConvolutionTest, UniformAbsorbsAndIdentityIsNeutral) {
  const auto basis = BasisFor("a5");
  const ProductGroup space = SpaceOf(*basis, 2);
  std::mt19937_64 rng(8);
  const Dist p(space, oracle::RandomProbabilities(space.size(), rng));
  const Dist u = Dist::Uniform(space);
  EXPECT_LE(MaxAbsDiff(ConvolveDirect(u, p).values(), u.values()), 1e-15);
  EXPECT_LE(MaxAbsDiff(ConvolveDirect(p, u).values(), u.values()), 1e-15);
  EXPECT_LE(MaxAbsDiff(ConvolveFourier(u, p, basis).values(), u.values()), 1e-15);
  const Dist e = Dist::PointMass(space, 0);
  EXPECT_EQ(MaxAbsDiff(ConvolveDirect(e, p).values(), p.values()), 0.0);
  EXPECT_LE(MaxAbsDiff(ConvolveFourier(e, p, basis).values(), p.values()), 1e-15);
}

TEST(ConvolutionTest, CyclicIsCircularConvolution) {
  const ProductGroup space(MakeGroup(GroupSpec::Cyclic(6)), 1);
  std::mt19937_64 rng(6);
  const auto pv = oracle::RandomProbabilities(6, rng), qv = oracle::RandomProbabilities(6, rng);
  std::vector<double> expected(6, 0.0);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) expected[(a + b) % 6] += pv[a] * qv[b];
  const Dist r = ConvolveDirect(Dist(space, pv), Dist(space, qv));
  EXPECT_LE(MaxAbsDiff(r.values(), expected), 1e-16);
  const Dist rf = ConvolveFourier(Dist(space, pv), Dist(space, qv), BasisFor("cyclic:6"));
  EXPECT_LE(MaxAbsDiff(rf.values(), expected), 1e-15);
}

TEST(ConvolutionTest, DirectMatchesPairEnumeration) {
  const auto basis = BasisFor("sl2:3");
  const ProductGroup space = SpaceOf(*basis, 2);
  std::mt19937_64 rng(12);
  const auto pv = oracle::RandomProbabilities(space.size(), rng);
  const auto qv = oracle::RandomProbabilities(space.size(), rng);
  const auto expected = oracle::PairConvolution(space, pv, qv);
  EXPECT_LE(MaxAbsDiff(ConvolveDirect(Dist(space, pv), Dist(space, qv)).values(), expected),
            1e-16);
}

class EngineAgreementTest : public ::testing::TestWithParam<int> {};

TEST_P(EngineAgreementTest, HundredRandomPairsOnAlt5) {
  const int m = GetParam();
  const auto basis = BasisFor("a5");
  const ProductGroup space = SpaceOf(*basis, m);
  std::mt19937_64 rng(1000 + m);
  const double g = static_cast<double>(space.size());
  for (int t = 0; t < 100; ++t) {
    const Dist p(space, oracle::RandomProbabilities(space.size(), rng));
    const Dist q(space, oracle::RandomProbabilities(space.size(), rng));
    const Dist direct = ConvolveDirect(p, q);
    const Dist fourier = ConvolveFourier(p, q, basis);
    ASSERT_LE(MaxAbsDiff(direct.values(), fourier.values()), 1e-9) << "pair " << t;
    if (t % 10 != 0) continue;
    // |(p*q)^(a)|^2 <= G^2 |p^(a)|^2 |q^(a)|^2 on every product irrep.
    const FourierData fp = ProductFourierForward(p.values(), m, basis);
    const FourierData fq = ProductFourierForward(q.values(), m, basis);
    const FourierData fc = ProductFourierForward(direct.values(), m, basis);
    for (const auto& idx : oracle::AllProductIndices(basis->num_irreps(), m)) {
      const double lhs = FrobeniusNormSq(fc.Coefficient(idx));
      const double rhs =
          g * g * FrobeniusNormSq(fp.Coefficient(idx)) * FrobeniusNormSq(fq.Coefficient(idx));
      ASSERT_LE(lhs, rhs * (1 + 1e-9) + 1e-30);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Arity, EngineAgreementTest, ::testing::Values(1, 2));

TEST(ConvolutionTest, EngineSelection) {
  EXPECT_EQ(ResolveEngine(10'000, ConvolutionEngine::kAuto), ConvolutionEngine::kDirect);
  EXPECT_EQ(ResolveEngine(10'001, ConvolutionEngine::kAuto), ConvolutionEngine::kFourier);
  EXPECT_EQ(ResolveEngine(50, ConvolutionEngine::kFourier), ConvolutionEngine::kFourier);
  EXPECT_EQ(ResolveEngine(1'000'000, ConvolutionEngine::kDirect), ConvolutionEngine::kDirect);
}

TEST(MarginalTest, BasicCases) {
  const auto basis = BasisFor("a5");
  const ProductGroup space = SpaceOf(*basis, 2);
  const Dist u = Dist::Uniform(space);
  const Dist mu = Marginalize(u, std::vector<int>{1});
  for (double v : mu.values()) EXPECT_NEAR(v, 1.0 / 60, 1e-17);
  const Dist d = Dist::PointMass(space, space.TupleToFlat(std::vector<Element>{7, 42}));
  const Dist m0 = Marginalize(d, std::vector<int>{0});
  EXPECT_EQ(m0[7], 1.0);
  EXPECT_THROW(Marginalize(d, std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(Marginalize(d, std::vector<int>{2}), std::invalid_argument);
  EXPECT_THROW(Marginalize(d, std::vector<int>{0, 0}), std::invalid_argument);
}

TEST(MarginalTest, MatchesTupleDecoding) {
  const auto basis = BasisFor("sl2:3");
  const ProductGroup space = SpaceOf(*basis, 3);
  std::mt19937_64 rng(31);
  const auto pv = oracle::RandomProbabilities(space.size(), rng);
  for (int k = 1; k <= 3; ++k) {
    for (const auto& s : Subsets(3, k)) {
      const auto fast = MarginalizeValues<double>(space, pv, s);
      EXPECT_LE(MaxAbsDiff(fast, oracle::TupleMarginal(space, pv, s)), 1e-15);
    }
  }
  std::vector<std::uint64_t> counts(space.size());
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = i % 7;
  const auto mc = MarginalizeValues<std::uint64_t>(space, counts, std::vector<int>{0, 2});
  std::uint64_t total = 0;
  for (auto c : mc) total += c;
  std::uint64_t expected = 0;
  for (auto c : counts) expected += c;
  EXPECT_EQ(total, expected);
}

TEST(MarginalTest, CommutesWithConvolutionOnAlt5Cubed) {
  const auto basis = BasisFor("a5");
  const ProductGroup space = SpaceOf(*basis, 3);
  std::mt19937_64 rng(77);
  for (int t = 0; t < 3; ++t) {
    const auto pv = oracle::SparseProbabilities(space.size(), 40, rng);
    const auto qv = oracle::RandomProbabilities(space.size(), rng);
    const Dist conv = ConvolveDirect(Dist(space, pv), Dist(space, qv));
    const auto brute = oracle::PairConvolution(space, pv, qv);
    ASSERT_LE(MaxAbsDiff(conv.values(), brute), 1e-15);
    for (const std::vector<int>& s : {std::vector<int>{0}, {1, 2}, {0, 2}}) {
      const ProductGroup sub(space.base_ptr(), static_cast<int>(s.size()));
      const auto lhs = oracle::TupleMarginal(space, brute, s);
      const auto rhs = oracle::PairConvolution(sub, oracle::TupleMarginal(space, pv, s),
                                               oracle::TupleMarginal(space, qv, s));
      EXPECT_LE(MaxAbsDiff(lhs, rhs), 1e-10);
      EXPECT_LE(MaxAbsDiff(Marginalize(conv, s).values(), lhs), 1e-15);
    }
  }
}

TEST(LowWeightTest, UniformHasNoLowWeightMass) {
  const auto basis = BasisFor("a5");
  const ProductGroup space = SpaceOf(*basis, 3);
  const Dist u = Dist::Uniform(space);
  EXPECT_LE(MaxLowWeightNorm(u, 3, basis).norm, 1e-15);
  for (const auto& c : LowWeightCoefficients(u, 2, basis)) {
    ASSERT_LE(std::sqrt(FrobeniusNormSq(c.value)), 1e-15);
  }
}

TEST(LowWeightTest, AgreesWithFullTransform) {
  struct Case {
    std::string group;
    int m, k;
  };
  std::mt19937_64 rng(4);
  for (const Case& cs : {Case{"a5", 3, 1}, Case{"sl2:3", 3, 2}, Case{"cyclic:3", 4, 3}}) {
    const auto basis = BasisFor(cs.group);
    const ProductGroup space = SpaceOf(*basis, cs.m);
    const Dist p(space, oracle::RandomProbabilities(space.size(), rng));
    const FourierData full = ProductFourierForward(p.values(), cs.m, basis);
    const auto low = LowWeightCoefficients(p, cs.k, basis);
    std::size_t expected_count = 0;
    double worst = 0.0;
    for (const auto& idx : oracle::AllProductIndices(basis->num_irreps(), cs.m)) {
      const int w = Weight(idx);
      if (w < 1 || w > cs.k) continue;
      ++expected_count;
      worst = std::max(worst, std::sqrt(FrobeniusNormSq(full.Coefficient(idx))));
    }
    ASSERT_EQ(low.size(), expected_count) << cs.group;
    for (const auto& c : low) {
      ASSERT_LE((c.value - full.Coefficient(c.index)).cwiseAbs().maxCoeff(), 1e-10) << cs.group;
    }
    const LowWeightMax mx = MaxLowWeightNorm(p, cs.k, basis);
    EXPECT_NEAR(mx.norm, worst, 1e-12);
    EXPECT_NEAR(std::sqrt(FrobeniusNormSq(full.Coefficient(mx.argmax))), worst, 1e-12);
  }
}

TEST(DistTest, ValidationAndBudget) {
  const ProductGroup space(MakeGroup(GroupSpec::Cyclic(2)), 1);
  const Dist clamped(space, {1.0, -1e-16});
  EXPECT_EQ(clamped[1], 0.0);
  EXPECT_THROW(Dist(space, {1.1, -0.1}), std::invalid_argument);
  EXPECT_THROW(Dist(space, {0.5, 0.4}), std::invalid_argument);
  EXPECT_THROW(Dist(space, {1.0}), std::invalid_argument);
  const ProductGroup huge(MakeGroup(GroupSpec::Alt5()), 5);
  EXPECT_THROW(Dist::Uniform(huge), BudgetError);
}

TEST(DistTest, FileRoundTrip) {
  const ProductGroup space(MakeGroup(GroupSpec::Sl2(3)), 2);
  std::mt19937_64 rng(9);
  const Dist p(space, oracle::RandomProbabilities(space.size(), rng));
  const auto dir = std::filesystem::temp_directory_path();
  for (DistFormat fmt : {DistFormat::kText, DistFormat::kBinary}) {
    const std::string path = (dir / "quasimix_dist_roundtrip").string();
    WriteDist(path, p, fmt);
    const Dist back = ReadDist(path, space);
    for (std::size_t i = 0; i < p.size(); ++i) ASSERT_EQ(back[i], p[i]);
    const ProductGroup other(MakeGroup(GroupSpec::Sl2(3)), 1);
    EXPECT_THROW(ReadDist(path, other), std::runtime_error);
    std::filesystem::remove(path);
  }
}

}  // namespace
}  // namespace quasimix
