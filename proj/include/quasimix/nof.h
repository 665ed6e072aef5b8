#ifndef QUASIMIX_NOF_H_
#define QUASIMIX_NOF_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "quasimix/boost.h"
#include "quasimix/uniformity.h"

namespace quasimix {

// Largest |H|^{2k} enumerated exactly.
inline constexpr std::uint64_t kEnumerationBudget = 1'000'000'000;

// Box-norm distribution over H^m, m = 2^k. Coordinate c = sum_i x_i 2^i
// holds s(x) = u_0^{x_0} u_1^{x_1} ... u_{k-1}^{x_{k-1}}.
class BoxDist {
 public:
  BoxDist(std::shared_ptr<const GroupTable> base, int parties, std::vector<std::uint64_t> counts);

  const ProductGroup& space() const { return space_; }
  int parties() const { return parties_; }
  int arity() const { return space_.arity(); }
  std::span<const std::uint64_t> counts() const { return counts_; }
  // |H|^{2k}.
  std::uint64_t normalizer() const { return normalizer_; }
  Dist ToDist() const;

 private:
  ProductGroup space_;
  int parties_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t normalizer_;
};

// Throws std::invalid_argument unless parties >= 2; BudgetError when
// |H|^{2k} exceeds kEnumerationBudget (use SampleS) or H^m is too large for
// dense counts.
BoxDist ExactS(std::shared_ptr<const GroupTable> base, int parties);

// One draw; u_0^0, u_0^1, u_1^0, ... are taken from rng in that order.
std::vector<Element> SampleS(const GroupTable& h, int parties, std::mt19937_64& rng);
std::vector<Element> SampleS(const GroupTable& h, int parties, std::uint64_t seed);

// For parties = 2: s(00) s(10)^{-1} s(11) s(01)^{-1} = e, i.e.
// v_0 v_1^{-1} v_3 v_2^{-1} = e on the coordinate tuple v.
bool CancellationIdentityHolds(const GroupTable& h, std::span<const Element> v);

// Audit file: header, then one "flat count" line per nonzero entry.
void WriteCounts(const std::string& path, const BoxDist& s);

struct SUniformityReport {
  bool is_3_uniform = false;
  Rational three_wise_eps;
  std::vector<int> worst_three_subset;
  Rational four_wise_deviation;
  std::vector<int> worst_four_subset;
  std::uint64_t enumerated = 0;
  // Every enumerated tuple satisfied the cancellation identity (k = 2 only).
  bool identity_exhaustive = false;
};

// Streams the enumeration and accumulates every 3- and 4-subset marginal
// with integer counts; no floating point.
SUniformityReport VerifySUniformity(std::shared_ptr<const GroupTable> base, int parties);

struct AdvantageCurve {
  ExperimentLog log;  // fresh-copy rows; the step column is t, the number of copies
  bool monotone = true;  // tv non-increasing (slack 1e-12)
  int reached_target_at_t = -1;  // first t with eps_uniform <= target, -1 if none
};

// t-fold convolutions of s for t = 1..t_max, stopping at target_eps.
AdvantageCurve ComputeAdvantageCurve(const BoxDist& s, int t_max, double target_eps,
                                     std::shared_ptr<const SpectralBasis> basis,
                                     const std::vector<int>& ks = {},
                                     ConvolutionEngine engine = ConvolutionEngine::kAuto);

}  // namespace quasimix

#endif  // QUASIMIX_NOF_H_
