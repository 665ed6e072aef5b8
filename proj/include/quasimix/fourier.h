#ifndef QUASIMIX_FOURIER_H_
#define QUASIMIX_FOURIER_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "quasimix/dist.h"
#include "quasimix/repr.h"

namespace quasimix {

// Frobenius norm squared as sum_ij |M_ij|^2.
double FrobeniusNormSq(const ComplexMatrix& m);
// The same quantity as tr(M M^*).
double FrobeniusNormSqTrace(const ComplexMatrix& m);

// Flattened irrep coordinates of a base group. Spectral index
// s = offset(r) + i * dim(r) + j addresses entry (i, j) of irrep r; the
// trivial irrep owns s = 0.
class SpectralBasis {
 public:
  explicit SpectralBasis(std::shared_ptr<const IrrepSet> irreps);

  const IrrepSet& irreps() const { return *irreps_; }
  const std::shared_ptr<const IrrepSet>& irreps_ptr() const { return irreps_; }
  const GroupTable& group() const { return irreps_->group(); }
  int order() const { return order_; }
  int num_irreps() const { return irreps_->size(); }
  int dim(int r) const { return dims_[r]; }
  int offset(int r) const { return offsets_[r]; }
  int irrep_of(int s) const { return irrep_of_[s]; }

  // [s, x] = conj(rho(x)_ij) / n.
  const ComplexMatrix& forward() const { return forward_; }
  // [x, s] = d_rho * rho(x)_ij.
  const ComplexMatrix& inverse() const { return inverse_; }

 private:
  std::shared_ptr<const IrrepSet> irreps_;
  int order_;
  std::vector<int> dims_, offsets_, irrep_of_;
  ComplexMatrix forward_, inverse_;
};

std::shared_ptr<const SpectralBasis> MakeSpectralBasis(std::shared_ptr<const IrrepSet> irreps);

// m-tuple of base irrep indices.
using ProductIrrepIndex = std::vector<int>;
// Number of non-trivial components.
int Weight(std::span<const int> index);

// Fourier coefficients of a function on H^m, stored as n^m complex numbers.
// The coefficient of rho_0 x ... x rho_{m-1} is the Kronecker product
// rho_{m-1} (x) ... (x) rho_0 applied to the coefficient layout: its row
// index is i_0 + d_0 (i_1 + d_1 (...)), coordinate 0 fastest.
class FourierData {
 public:
  FourierData(std::shared_ptr<const SpectralBasis> basis, int arity, std::vector<Complex> data);

  const SpectralBasis& basis() const { return *basis_; }
  const std::shared_ptr<const SpectralBasis>& basis_ptr() const { return basis_; }
  int arity() const { return arity_; }
  std::size_t size() const { return data_.size(); }
  std::span<const Complex> data() const { return data_; }
  std::span<Complex> mutable_data() { return data_; }
  std::vector<Complex> release() && { return std::move(data_); }

  int CoefficientDim(std::span<const int> index) const;
  ComplexMatrix Coefficient(std::span<const int> index) const;
  void SetCoefficient(std::span<const int> index, const ComplexMatrix& value);
  // Sum over all product irreps of dim^2.
  std::size_t StorageCount() const;

 private:
  std::shared_ptr<const SpectralBasis> basis_;
  int arity_;
  std::vector<Complex> data_;
};

// Layout of one product-irrep block inside FourierData storage: entry
// (I, J) lives at base + row[I] + col[J].
struct BlockLayout {
  ProductIrrepIndex index;
  std::size_t base = 0;
  std::vector<std::size_t> row, col;
};
BlockLayout LayoutOf(const SpectralBasis& basis, int arity, std::span<const int> index);
// Visits every product irrep of H^m in odometer order (coordinate 0 fastest).
void ForEachBlock(const SpectralBasis& basis, int arity,
                  const std::function<void(const BlockLayout&)>& visit);

FourierData ProductFourierForward(std::span<const double> f, int arity,
                                  std::shared_ptr<const SpectralBasis> basis);
FourierData ProductFourierForward(std::span<const Complex> f, int arity,
                                  std::shared_ptr<const SpectralBasis> basis);
std::vector<Complex> ProductFourierInverse(const FourierData& c);
// Real part of the inverse; stores max |imag| in *max_imag when given.
std::vector<double> ProductFourierInverseReal(FourierData c, double* max_imag = nullptr);

// Single-group forms (arity 1).
FourierData FourierForward(std::span<const Complex> f, std::shared_ptr<const SpectralBasis> basis);
FourierData FourierForward(std::span<const double> f, std::shared_ptr<const SpectralBasis> basis);
std::vector<Complex> FourierInverse(const FourierData& c);

// a(rho) <- G * a(rho) b(rho) for every product irrep, G = |H|^m.
void MultiplyCoefficientsInPlace(FourierData& a, const FourierData& b);
// a(rho) <- G * a(rho)^2.
void SquareCoefficientsInPlace(FourierData& a);

enum class ConvolutionEngine { kAuto, kDirect, kFourier };
inline constexpr std::size_t kFourierEngineThreshold = 10'000;
// kAuto picks kFourier above `threshold` states.
ConvolutionEngine ResolveEngine(std::size_t states, ConvolutionEngine engine,
                                std::size_t threshold = kFourierEngineThreshold);

// (p * q)(x) = sum_y p(y) q(y^{-1} x), coordinatewise on H^m.
Dist ConvolveDirect(const Dist& p, const Dist& q);
Dist ConvolveFourier(const Dist& p, const Dist& q, std::shared_ptr<const SpectralBasis> basis);
Dist Convolve(const Dist& p, const Dist& q, std::shared_ptr<const SpectralBasis> basis,
              ConvolutionEngine engine = ConvolutionEngine::kAuto);

// Dist from spectral data of a distribution; negatives are clamped.
Dist DistFromSpectrum(FourierData c, const ProductGroup& space);

// Spectrum of the marginal of p on `coords`.
struct SubsetSpectrum {
  std::vector<int> coords;
  FourierData spectrum;
};
// One entry per subset S with 1 <= |S| <= k. The coefficient of p at the
// product irrep equal to rho_S on S and trivial elsewhere is
// n^{-(m - |S|)} times the marginal coefficient at rho_S.
std::vector<SubsetSpectrum> LowWeightSpectra(const Dist& p, int k,
                                             std::shared_ptr<const SpectralBasis> basis);
// Same for arbitrary real values on `space`.
std::vector<SubsetSpectrum> LowWeightSpectra(const ProductGroup& space,
                                             std::span<const double> values, int k,
                                             std::shared_ptr<const SpectralBasis> basis);

struct LowWeightCoefficient {
  ProductIrrepIndex index;  // full m-tuple
  ComplexMatrix value;
};
// All p-hat(rho) with 1 <= weight(rho) <= k.
std::vector<LowWeightCoefficient> LowWeightCoefficients(const Dist& p, int k,
                                                        std::shared_ptr<const SpectralBasis> basis);

struct LowWeightMax {
  double norm = 0.0;  // max |p-hat(rho)|_2
  ProductIrrepIndex argmax;
};
LowWeightMax MaxLowWeightNorm(const Dist& p, int k, std::shared_ptr<const SpectralBasis> basis);
LowWeightMax MaxLowWeightNorm(const ProductGroup& space, std::span<const double> values, int k,
                              std::shared_ptr<const SpectralBasis> basis);

}  // namespace quasimix

#endif  // QUASIMIX_FOURIER_H_
