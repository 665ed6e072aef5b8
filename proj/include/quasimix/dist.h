#ifndef QUASIMIX_DIST_H_
#define QUASIMIX_DIST_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quasimix/groups.h"

namespace quasimix {

// Largest dense state space handled by the pipelines: alt5^4.
inline constexpr std::size_t kMaxDenseStates = 12'960'000;
inline constexpr double kDistSumTolerance = 1e-9;
// Entries in [-kNegativeClamp, 0) are clamped to 0 on ingestion.
inline constexpr double kNegativeClamp = 1e-15;

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws BudgetError if H^m exceeds kMaxDenseStates.
void CheckDenseBudget(const ProductGroup& space);

// A dense probability vector over H^m (m = 1 for a single group).
class Dist {
 public:
  // Validates length, clamps entries >= -1e-15 to 0 and requires the sum to
  // be 1 within 1e-9.
  Dist(ProductGroup space, std::vector<double> values);

  static Dist Uniform(const ProductGroup& space);
  static Dist PointMass(const ProductGroup& space, std::size_t flat);
  // (1 - t) * a + t * b.
  static Dist Mix(const Dist& a, const Dist& b, double t);

  const ProductGroup& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::vector<double> release() && { return std::move(values_); }

 private:
  ProductGroup space_;
  std::vector<double> values_;
};

// Normalizes non-negative weights into a Dist.
Dist NormalizeWeights(const ProductGroup& space, std::vector<double> weights);

// Sorted, duplicate-free coordinate subset validated against arity m.
std::vector<int> CanonicalSubset(std::span<const int> coords, int arity);

// Marginal onto `coords` (ascending): output coordinate j is input coordinate
// coords[j]. Exact for integer T.
template <class T>
std::vector<T> MarginalizeValues(const ProductGroup& space, std::span<const T> values,
                                 std::span<const int> coords) {
  const std::vector<int> subset = CanonicalSubset(coords, space.arity());
  if (values.size() != space.size()) throw std::invalid_argument("marginalize: size mismatch");
  const std::size_t n = static_cast<std::size_t>(space.base_order());
  const int m = space.arity();
  // contrib[c][x]: position of x (in coordinate c) inside the marginal.
  std::vector<std::vector<std::size_t>> contrib(m, std::vector<std::size_t>(n, 0));
  std::size_t out_size = 1;
  for (int c : subset) {
    for (std::size_t x = 0; x < n; ++x) contrib[c][x] = x * out_size;
    out_size *= n;
  }
  std::vector<T> out(out_size, T{});
  const std::size_t rows = space.size() / n;
  std::vector<std::size_t> digit(m, 0);
  std::size_t base = 0;
  const std::size_t* inner = contrib[0].data();
  for (std::size_t h = 0; h < rows; ++h) {
    const T* src = values.data() + h * n;
    for (std::size_t x = 0; x < n; ++x) out[base + inner[x]] += src[x];
    for (int c = 1; c < m; ++c) {
      base -= contrib[c][digit[c]];
      if (++digit[c] < n) {
        base += contrib[c][digit[c]];
        break;
      }
      digit[c] = 0;
      base += contrib[c][0];
    }
  }
  return out;
}

Dist Marginalize(const Dist& p, std::span<const int> coords);

// All C(m, k) k-subsets of {0..m-1} in lexicographic order.
std::vector<std::vector<int>> Subsets(int m, int k);

// Dist files: a text header naming the group and its fingerprint, then the
// values either as text (one per line, shortest round-trip form) or as raw
// little-endian doubles.
enum class DistFormat { kText, kBinary };
void WriteDist(const std::string& path, const Dist& p, DistFormat format);
// Throws std::runtime_error if the file belongs to another space.
Dist ReadDist(const std::string& path, const ProductGroup& space);

}  // namespace quasimix

#endif  // QUASIMIX_DIST_H_
