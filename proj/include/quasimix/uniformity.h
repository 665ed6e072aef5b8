#ifndef QUASIMIX_UNIFORMITY_H_
#define QUASIMIX_UNIFORMITY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quasimix/dist.h"
#include "quasimix/fourier.h"

namespace quasimix {

inline constexpr double kUniformityTol = 1e-10;
inline constexpr double kRepBoundSlack = 1e-12;

// max_x |p(x) |S| - 1| over a probability vector of length |S|.
double EpsUniform(std::span<const double> values);
double EpsUniform(const Dist& p);

struct SubsetEps {
  std::vector<int> subset;
  double eps = 0.0;
};

struct UniformityReport {
  double eps = 0.0;
  std::vector<int> worst_subset;
  std::vector<SubsetEps> per_subset;  // filled on request
};

// Max of EpsUniform over the marginals on all C(m, k) subsets.
UniformityReport EpsKUniform(const Dist& p, int k, bool with_table = false);
// "subset eps" rows, one per subset.
std::string FormatUniformityTable(const UniformityReport& r);

// Non-negative rational with 64-bit parts, kept in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rational Make(unsigned __int128 num, unsigned __int128 den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string ToString() const;
  bool is_zero() const { return num == 0; }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
};

// Exact max_x |c(x) |S| - N| / N for integer counts with total N.
Rational EpsUniformCounts(std::span<const std::uint64_t> counts);

struct ExactSubsetEps {
  std::vector<int> subset;
  Rational eps;
};

struct ExactUniformityReport {
  bool uniform = true;  // eps == 0 exactly
  Rational eps;
  std::vector<int> worst_subset;
  std::vector<ExactSubsetEps> per_subset;
};

// Integer-count form of EpsKUniform; no floating point involved.
ExactUniformityReport EpsKUniformCounts(const ProductGroup& space,
                                        std::span<const std::uint64_t> counts, int k);

struct FourierUniformity {
  bool uniform = false;
  double max_norm = 0.0;  // max |p-hat(rho)|_2 over 1 <= |rho| <= k
  ProductIrrepIndex argmax;
  double threshold = 0.0;  // tol / |space|
};

// k-uniform iff every coefficient of weight 1..k has norm <= tol / |space|.
FourierUniformity IsKUniformFourier(const Dist& p, int k,
                                    std::shared_ptr<const SpectralBasis> basis,
                                    double tol = kUniformityTol);

struct RepBound {
  double lhs = 0.0;  // |p-hat(rho)|_2^2
  double rhs = 0.0;  // d_rho eps^2 G^{-2}
  bool holds = true;
};

// Rejects the trivial product irrep. eps is EpsUniform(p).
RepBound RepBoundCheck(const Dist& p, std::span<const int> index,
                       std::shared_ptr<const SpectralBasis> basis);
RepBound RepBoundCheck(const FourierData& p_hat, double eps, std::span<const int> index);

}  // namespace quasimix

#endif  // QUASIMIX_UNIFORMITY_H_
