#include "quasimix/nof.h"

#include <fstream>
#include <stdexcept>

namespace quasimix {
namespace {

std::uint64_t CheckedPower(std::uint64_t base, int exp, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

void CheckParties(int parties) {
  if (parties < 2 || parties > 4) {
    throw std::invalid_argument("parties must be in [2, 4] (arity m = 2^k)");
  }
}

// Enumerates every (u_i^0, u_i^1)_{i<k} and calls visit(v) with the m
// coordinates s(x).
template <class Visit>
std::uint64_t Enumerate(const GroupTable& h, int parties, Visit&& visit) {
  const int n = h.order();
  const int m = 1 << parties;
  const std::uint64_t total = CheckedPower(n, 2 * parties, kEnumerationBudget);
  if (total > kEnumerationBudget) {
    throw BudgetError("|H|^(2k) = " + std::to_string(n) + "^" + std::to_string(2 * parties) +
                      " exceeds the exact enumeration budget of 10^9; use sample_s instead");
  }
  std::vector<Element> u(2 * parties, 0);  // u[2i + b] = u_i^b
  std::vector<Element> v(m);
  for (std::uint64_t it = 0; it < total; ++it) {
    for (int c = 0; c < m; ++c) {
      Element acc = u[c & 1];
      for (int i = 1; i < parties; ++i) acc = h.mul(acc, u[2 * i + ((c >> i) & 1)]);
      v[c] = acc;
    }
    visit(std::span<const Element>(v));
    for (int j = 0; j < 2 * parties; ++j) {
      if (++u[j] < n) break;
      u[j] = 0;
    }
  }
  return total;
}

}  // namespace

BoxDist::BoxDist(std::shared_ptr<const GroupTable> base, int parties,
                 std::vector<std::uint64_t> counts)
    : space_(std::move(base), 1 << parties), parties_(parties), counts_(std::move(counts)) {
  CheckParties(parties);
  if (counts_.size() != space_.size()) throw std::invalid_argument("BoxDist: count size mismatch");
  normalizer_ = CheckedPower(space_.base_order(), 2 * parties, ~std::uint64_t{0} / 2);
  unsigned __int128 sum = 0;
  for (auto c : counts_) sum += c;
  if (sum != normalizer_) throw std::invalid_argument("BoxDist: counts do not sum to |H|^(2k)");
}

Dist BoxDist::ToDist() const {
  std::vector<double> v(counts_.size());
  const double norm = static_cast<double>(normalizer_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(counts_[i]) / norm;
  return Dist(space_, std::move(v));
}

BoxDist ExactS(std::shared_ptr<const GroupTable> base, int parties) {
  if (!base) throw std::invalid_argument("ExactS: null group");
  CheckParties(parties);
  const ProductGroup space(base, 1 << parties);
  if (CheckedPower(base->order(), 1 << parties, kMaxDenseStates) > kMaxDenseStates) {
    throw BudgetError("H^m is too large for dense counts; use verify_s_uniformity or sample_s");
  }
  std::vector<std::uint64_t> counts(space.size(), 0);
  Enumerate(*base, parties, [&](std::span<const Element> v) { ++counts[space.TupleToFlat(v)]; });
  return BoxDist(std::move(base), parties, std::move(counts));
}

std::vector<Element> SampleS(const GroupTable& h, int parties, std::mt19937_64& rng) {
  CheckParties(parties);
  std::uniform_int_distribution<Element> pick(0, h.order() - 1);
  std::vector<Element> u(2 * parties);
  for (auto& x : u) x = pick(rng);
  const int m = 1 << parties;
  std::vector<Element> v(m);
  for (int c = 0; c < m; ++c) {
    Element acc = u[c & 1];
    for (int i = 1; i < parties; ++i) acc = h.mul(acc, u[2 * i + ((c >> i) & 1)]);
    v[c] = acc;
  }
  return v;
}

std::vector<Element> SampleS(const GroupTable& h, int parties, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return SampleS(h, parties, rng);
}

bool CancellationIdentityHolds(const GroupTable& h, std::span<const Element> v) {
  if (v.size() != 4) throw std::invalid_argument("cancellation identity needs 4 coordinates");
  return h.mul(h.mul(h.mul(v[0], h.inv(v[1])), v[3]), h.inv(v[2])) == h.identity();
}

void WriteCounts(const std::string& path, const BoxDist& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const GroupTable& h = s.space().base();
  out << "quasimix-counts 1\n"
      << "group " << h.spec().ToString() << '\n'
      << "fingerprint " << h.fingerprint_hex() << '\n'
      << "parties " << s.parties() << '\n'
      << "arity " << s.arity() << '\n'
      << "normalizer " << s.normalizer() << '\n';
  std::size_t nonzero = 0;
  for (auto c : s.counts()) nonzero += c != 0;
  out << "nonzero " << nonzero << '\n';
  for (std::size_t i = 0; i < s.counts().size(); ++i)
    if (s.counts()[i] != 0) out << i << ' ' << s.counts()[i] << '\n';
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SUniformityReport VerifySUniformity(std::shared_ptr<const GroupTable> base, int parties) {
  if (!base) throw std::invalid_argument("VerifySUniformity: null group");
  CheckParties(parties);
  const int m = 1 << parties;
  const std::size_t n = static_cast<std::size_t>(base->order());
  const auto s3 = Subsets(m, 3);
  const auto s4 = Subsets(m, 4);
  std::vector<std::vector<std::uint64_t>> c3(s3.size(), std::vector<std::uint64_t>(n * n * n));
  std::vector<std::vector<std::uint64_t>> c4(s4.size(),
                                             std::vector<std::uint64_t>(n * n * n * n));
  SUniformityReport r;
  r.identity_exhaustive = parties == 2;
  r.enumerated = Enumerate(*base, parties, [&](std::span<const Element> v) {
    for (std::size_t i = 0; i < s3.size(); ++i) {
      const auto& s = s3[i];
      ++c3[i][v[s[0]] + n * (v[s[1]] + n * v[s[2]])];
    }
    for (std::size_t i = 0; i < s4.size(); ++i) {
      const auto& s = s4[i];
      ++c4[i][v[s[0]] + n * (v[s[1]] + n * (v[s[2]] + n * v[s[3]]))];
    }
    if (parties == 2 && !CancellationIdentityHolds(*base, v)) r.identity_exhaustive = false;
  });
  for (std::size_t i = 0; i < s3.size(); ++i) {
    const Rational e = EpsUniformCounts(c3[i]);
    if (i == 0 || r.three_wise_eps < e) {
      r.three_wise_eps = e;
      r.worst_three_subset = s3[i];
    }
  }
  for (std::size_t i = 0; i < s4.size(); ++i) {
    const Rational e = EpsUniformCounts(c4[i]);
    if (i == 0 || r.four_wise_deviation < e) {
      r.four_wise_deviation = e;
      r.worst_four_subset = s4[i];
    }
  }
  r.is_3_uniform = r.three_wise_eps.is_zero();
  return r;
}

AdvantageCurve ComputeAdvantageCurve(const BoxDist& s, int t_max, double target_eps,
                                     std::shared_ptr<const SpectralBasis> basis,
                                     const std::vector<int>& ks, ConvolutionEngine engine) {
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  BoostConfig config;
  config.mode = BoostMode::kFreshCopy;
  config.ks = ks;
  config.max_steps = t_max - 1;
  config.target_eps = target_eps;
  config.engine = engine;
  const BoostResult run = BoostPipeline(s.ToDist(), config, std::move(basis));
  AdvantageCurve curve{ExperimentLog(ks), true, -1};
  double prev_tv = 0.0;
  for (const StepRecord& row : run.log.steps()) {
    StepRecord r = row;
    r.step = row.step + 1;
    if (r.step > 1 && r.tv_dist > prev_tv + kInequalitySlack) curve.monotone = false;
    prev_tv = r.tv_dist;
    if (curve.reached_target_at_t < 0 && r.linf_rel <= target_eps) curve.reached_target_at_t = r.step;
    curve.log.Add(r);
  }
  return curve;
}

}  // namespace quasimix
