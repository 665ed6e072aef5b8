#include "quasimix/uniformity.h"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace quasimix {
namespace {

std::string SubsetString(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + "}";
}

unsigned __int128 Gcd(unsigned __int128 a, unsigned __int128 b) {
  while (b != 0) {
    const unsigned __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

double EpsUniform(std::span<const double> values) {
  const double s = static_cast<double>(values.size());
  double eps = 0.0;
  for (double v : values) eps = std::max(eps, std::abs(v * s - 1.0));
  return eps;
}

double EpsUniform(const Dist& p) { return EpsUniform(p.values()); }

UniformityReport EpsKUniform(const Dist& p, int k, bool with_table) {
  const int m = p.space().arity();
  if (k < 1 || k > m) throw std::invalid_argument("eps_k_uniform needs 1 <= k <= m");
  UniformityReport r;
  for (const auto& s : Subsets(m, k)) {
    const std::vector<double> marg = MarginalizeValues<double>(p.space(), p.values(), s);
    const double e = EpsUniform(marg);
    if (r.worst_subset.empty() || e > r.eps) {
      r.eps = e;
      r.worst_subset = s;
    }
    if (with_table) r.per_subset.push_back({s, e});
  }
  return r;
}

std::string FormatUniformityTable(const UniformityReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "subset eps\n";
  for (const auto& row : r.per_subset) out << SubsetString(row.subset) << ' ' << row.eps << '\n';
  return out.str();
}

Rational Rational::Make(unsigned __int128 num, unsigned __int128 den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  const unsigned __int128 g = num == 0 ? den : Gcd(num, den);
  num /= g;
  den /= g;
  constexpr unsigned __int128 kMax = ~std::uint64_t{0};
  if (num > kMax || den > kMax) throw std::overflow_error("Rational: 64-bit overflow");
  return Rational{static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den)};
}

std::string Rational::ToString() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<unsigned __int128>(a.num) * b.den <
         static_cast<unsigned __int128>(b.num) * a.den;
}

Rational EpsUniformCounts(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("EpsUniformCounts: empty");
  unsigned __int128 total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("EpsUniformCounts: zero total");
  const unsigned __int128 s = counts.size();
  unsigned __int128 worst = 0;
  for (auto c : counts) {
    const unsigned __int128 scaled = static_cast<unsigned __int128>(c) * s;
    const unsigned __int128 dev = scaled > total ? scaled - total : total - scaled;
    worst = std::max(worst, dev);
  }
  return Rational::Make(worst, total);
}

ExactUniformityReport EpsKUniformCounts(const ProductGroup& space,
                                        std::span<const std::uint64_t> counts, int k) {
  const int m = space.arity();
  if (k < 1 || k > m) throw std::invalid_argument("eps_k_uniform needs 1 <= k <= m");
  ExactUniformityReport r;
  for (const auto& s : Subsets(m, k)) {
    const std::vector<std::uint64_t> marg = MarginalizeValues<std::uint64_t>(space, counts, s);
    const Rational e = EpsUniformCounts(marg);
    if (r.worst_subset.empty() || r.eps < e) {
      r.eps = e;
      r.worst_subset = s;
    }
    r.per_subset.push_back({s, e});
  }
  r.uniform = r.eps.is_zero();
  return r;
}

FourierUniformity IsKUniformFourier(const Dist& p, int k,
                                    std::shared_ptr<const SpectralBasis> basis, double tol) {
  const LowWeightMax mx = MaxLowWeightNorm(p, k, std::move(basis));
  FourierUniformity r;
  r.max_norm = mx.norm;
  r.argmax = mx.argmax;
  r.threshold = tol / static_cast<double>(p.size());
  r.uniform = mx.norm <= r.threshold;
  return r;
}

RepBound RepBoundCheck(const FourierData& p_hat, double eps, std::span<const int> index) {
  if (Weight(index) == 0) throw std::invalid_argument("rep bound needs a non-trivial irrep");
  RepBound r;
  r.lhs = FrobeniusNormSq(p_hat.Coefficient(index));
  const double g = static_cast<double>(p_hat.size());
  r.rhs = p_hat.CoefficientDim(index) * eps * eps / (g * g);
  r.holds = r.lhs <= r.rhs + kRepBoundSlack;
  return r;
}

RepBound RepBoundCheck(const Dist& p, std::span<const int> index,
                       std::shared_ptr<const SpectralBasis> basis) {
  const FourierData ph = ProductFourierForward(p.values(), p.space().arity(), std::move(basis));
  return RepBoundCheck(ph, EpsUniform(p), index);
}

}  // namespace quasimix
