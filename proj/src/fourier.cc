#include "quasimix/fourier.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quasimix {
namespace {

using RowMatC = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kChunkRows = 4096;
// Negative outputs of a spectral round trip larger than this are not
// treated as rounding noise.
constexpr double kSpectralClamp = 1e-12;

std::size_t Power(std::size_t n, int m) {
  std::size_t r = 1;
  for (int i = 0; i < m; ++i) r *= n;
  return r;
}

void CheckBasis(const ProductGroup& space, const SpectralBasis& basis) {
  if (space.base().fingerprint() != basis.irreps().group_fingerprint()) {
    throw std::invalid_argument("irreps belong to " + basis.group().spec().ToString() +
                                ", not to " + space.base().spec().ToString());
  }
}

// out[o, s, i] = sum_x m(s, x) in[o, x, i] with i < inner.
void ApplyAxis(const ComplexMatrix& m, const Complex* in, Complex* out, std::size_t n,
               std::size_t inner, std::size_t outer) {
  const auto ni = static_cast<Eigen::Index>(n);
  if (inner == 1) {
    Eigen::Map<const RowMatC> a(in, static_cast<Eigen::Index>(outer), ni);
    Eigen::Map<RowMatC> b(out, static_cast<Eigen::Index>(outer), ni);
    b.noalias() = a * m.transpose();
    return;
  }
  const auto ii = static_cast<Eigen::Index>(inner);
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<const RowMatC> a(in + o * n * inner, ni, ii);
    Eigen::Map<RowMatC> b(out + o * n * inner, ni, ii);
    b.noalias() = m * a;
  }
}

// Axis 0 of a real input.
void ForwardAxis0Real(const SpectralBasis& basis, const double* in, Complex* out,
                      std::size_t rows) {
  const std::size_t n = static_cast<std::size_t>(basis.order());
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd re_t = basis.forward().real().transpose();
  const Eigen::MatrixXd im_t = basis.forward().imag().transpose();
  RowMatD tre, tim;
  for (std::size_t r0 = 0; r0 < rows; r0 += kChunkRows) {
    const auto len = static_cast<Eigen::Index>(std::min(kChunkRows, rows - r0));
    Eigen::Map<const RowMatD> a(in + r0 * n, len, ni);
    tre.noalias() = a * re_t;
    tim.noalias() = a * im_t;
    Complex* dst = out + r0 * n;
    for (Eigen::Index r = 0; r < len; ++r)
      for (Eigen::Index s = 0; s < ni; ++s) dst[r * ni + s] = Complex(tre(r, s), tim(r, s));
  }
}

// Axis 0 of the inverse, keeping the real part.
void InverseAxis0Real(const SpectralBasis& basis, const Complex* in, double* out,
                      std::size_t rows, double* max_imag) {
  const std::size_t n = static_cast<std::size_t>(basis.order());
  const auto ni = static_cast<Eigen::Index>(n);
  const ComplexMatrix inv_t = basis.inverse().transpose();
  RowMatC t;
  double worst = 0.0;
  for (std::size_t r0 = 0; r0 < rows; r0 += kChunkRows) {
    const auto len = static_cast<Eigen::Index>(std::min(kChunkRows, rows - r0));
    Eigen::Map<const RowMatC> a(in + r0 * n, len, ni);
    t.noalias() = a * inv_t;
    double* dst = out + r0 * n;
    for (Eigen::Index r = 0; r < len; ++r) {
      for (Eigen::Index x = 0; x < ni; ++x) {
        dst[r * ni + x] = t(r, x).real();
        worst = std::max(worst, std::abs(t(r, x).imag()));
      }
    }
  }
  if (max_imag) *max_imag = worst;
}

std::vector<Complex> ForwardComplexAxes(std::vector<Complex> buf, const SpectralBasis& basis,
                                        int arity, int first_axis) {
  const std::size_t n = static_cast<std::size_t>(basis.order());
  const std::size_t total = buf.size();
  std::vector<Complex> other(arity > first_axis ? total : 0);
  for (int axis = first_axis; axis < arity; ++axis) {
    const std::size_t inner = Power(n, axis);
    ApplyAxis(basis.forward(), buf.data(), other.data(), n, inner, total / (n * inner));
    buf.swap(other);
  }
  return buf;
}

}  // namespace

double FrobeniusNormSq(const ComplexMatrix& m) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::norm(m(i, j));
  return s;
}

double FrobeniusNormSqTrace(const ComplexMatrix& m) { return (m * m.adjoint()).trace().real(); }

SpectralBasis::SpectralBasis(std::shared_ptr<const IrrepSet> irreps)
    : irreps_(std::move(irreps)), order_(0) {
  if (!irreps_) throw std::invalid_argument("SpectralBasis: null irrep set");
  order_ = irreps_->group().order();
  if (irreps_->SumOfSquares() != order_) {
    throw std::invalid_argument("SpectralBasis: irrep set is incomplete");
  }
  const int r_count = irreps_->size();
  dims_.resize(r_count);
  offsets_.resize(r_count);
  irrep_of_.resize(order_);
  int off = 0;
  for (int r = 0; r < r_count; ++r) {
    dims_[r] = (*irreps_)[r].dim;
    offsets_[r] = off;
    for (int s = 0; s < dims_[r] * dims_[r]; ++s) irrep_of_[off + s] = r;
    off += dims_[r] * dims_[r];
  }
  if (dims_[0] != 1) throw std::invalid_argument("SpectralBasis: first irrep must be trivial");
  forward_.resize(order_, order_);
  inverse_.resize(order_, order_);
  const double inv_n = 1.0 / order_;
  for (int r = 0; r < r_count; ++r) {
    const Irrep& rho = (*irreps_)[r];
    const int d = rho.dim;
    for (int x = 0; x < order_; ++x) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          const int s = offsets_[r] + i * d + j;
          const Complex v = rho.matrices[x](i, j);
          forward_(s, x) = std::conj(v) * inv_n;
          inverse_(x, s) = static_cast<double>(d) * v;
        }
      }
    }
  }
}

std::shared_ptr<const SpectralBasis> MakeSpectralBasis(std::shared_ptr<const IrrepSet> irreps) {
  return std::make_shared<const SpectralBasis>(std::move(irreps));
}

int Weight(std::span<const int> index) {
  return static_cast<int>(std::count_if(index.begin(), index.end(), [](int r) { return r != 0; }));
}

FourierData::FourierData(std::shared_ptr<const SpectralBasis> basis, int arity,
                         std::vector<Complex> data)
    : basis_(std::move(basis)), arity_(arity), data_(std::move(data)) {
  if (!basis_) throw std::invalid_argument("FourierData: null basis");
  if (arity_ < 1) throw std::invalid_argument("FourierData: arity must be >= 1");
  if (data_.size() != Power(basis_->order(), arity_)) {
    throw std::invalid_argument("FourierData: storage size does not match |H|^m");
  }
}

BlockLayout LayoutOf(const SpectralBasis& basis, int arity, std::span<const int> index) {
  if (static_cast<int>(index.size()) != arity) {
    throw std::invalid_argument("product irrep index has wrong arity");
  }
  const std::size_t n = static_cast<std::size_t>(basis.order());
  BlockLayout b;
  b.index.assign(index.begin(), index.end());
  b.row.assign(1, 0);
  b.col.assign(1, 0);
  std::size_t stride = 1;
  for (int c = 0; c < arity; ++c) {
    const int r = index[c];
    if (r < 0 || r >= basis.num_irreps()) throw std::out_of_range("irrep index out of range");
    const std::size_t d = static_cast<std::size_t>(basis.dim(r));
    b.base += static_cast<std::size_t>(basis.offset(r)) * stride;
    std::vector<std::size_t> row, col;
    row.reserve(b.row.size() * d);
    col.reserve(b.col.size() * d);
    // Coordinate c is the slower index: new I = I_prev + D_prev * i_c.
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t prev : b.row) row.push_back(prev + i * d * stride);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t prev : b.col) col.push_back(prev + j * stride);
    b.row.swap(row);
    b.col.swap(col);
    stride *= n;
  }
  return b;
}

void ForEachBlock(const SpectralBasis& basis, int arity,
                  const std::function<void(const BlockLayout&)>& visit) {
  std::vector<int> idx(arity, 0);
  const int r_count = basis.num_irreps();
  while (true) {
    visit(LayoutOf(basis, arity, idx));
    int c = 0;
    while (c < arity && ++idx[c] == r_count) idx[c++] = 0;
    if (c == arity) break;
  }
}

int FourierData::CoefficientDim(std::span<const int> index) const {
  int d = 1;
  for (int r : index) d *= basis_->dim(r);
  return d;
}

ComplexMatrix FourierData::Coefficient(std::span<const int> index) const {
  const BlockLayout b = LayoutOf(*basis_, arity_, index);
  const auto d = static_cast<Eigen::Index>(b.row.size());
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = data_[b.base + b.row[i] + b.col[j]];
  return m;
}

void FourierData::SetCoefficient(std::span<const int> index, const ComplexMatrix& value) {
  const BlockLayout b = LayoutOf(*basis_, arity_, index);
  const auto d = static_cast<Eigen::Index>(b.row.size());
  if (value.rows() != d || value.cols() != d) {
    throw std::invalid_argument("SetCoefficient: wrong block dimension");
  }
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) data_[b.base + b.row[i] + b.col[j]] = value(i, j);
}

std::size_t FourierData::StorageCount() const {
  std::size_t total = 0;
  ForEachBlock(*basis_, arity_, [&](const BlockLayout& b) { total += b.row.size() * b.col.size(); });
  return total;
}

FourierData ProductFourierForward(std::span<const double> f, int arity,
                                  std::shared_ptr<const SpectralBasis> basis) {
  if (!basis) throw std::invalid_argument("ProductFourierForward: null basis");
  if (arity < 1) throw std::invalid_argument("ProductFourierForward: arity must be >= 1");
  const std::size_t n = static_cast<std::size_t>(basis->order());
  const std::size_t total = Power(n, arity);
  if (total > kMaxDenseStates) throw BudgetError("ProductFourierForward: dense budget exceeded");
  if (f.size() != total) throw std::invalid_argument("ProductFourierForward: size mismatch");
  std::vector<Complex> buf(total);
  ForwardAxis0Real(*basis, f.data(), buf.data(), total / n);
  buf = ForwardComplexAxes(std::move(buf), *basis, arity, 1);
  return FourierData(std::move(basis), arity, std::move(buf));
}

FourierData ProductFourierForward(std::span<const Complex> f, int arity,
                                  std::shared_ptr<const SpectralBasis> basis) {
  if (!basis) throw std::invalid_argument("ProductFourierForward: null basis");
  if (arity < 1) throw std::invalid_argument("ProductFourierForward: arity must be >= 1");
  const std::size_t total = Power(basis->order(), arity);
  if (total > kMaxDenseStates) throw BudgetError("ProductFourierForward: dense budget exceeded");
  if (f.size() != total) throw std::invalid_argument("ProductFourierForward: size mismatch");
  std::vector<Complex> buf = ForwardComplexAxes(std::vector<Complex>(f.begin(), f.end()), *basis,
                                                arity, 0);
  return FourierData(std::move(basis), arity, std::move(buf));
}

std::vector<Complex> ProductFourierInverse(const FourierData& c) {
  const SpectralBasis& basis = c.basis();
  const std::size_t n = static_cast<std::size_t>(basis.order());
  const std::size_t total = c.size();
  std::vector<Complex> buf(c.data().begin(), c.data().end());
  std::vector<Complex> other(total);
  for (int axis = c.arity() - 1; axis >= 0; --axis) {
    const std::size_t inner = Power(n, axis);
    ApplyAxis(basis.inverse(), buf.data(), other.data(), n, inner, total / (n * inner));
    buf.swap(other);
  }
  return buf;
}

std::vector<double> ProductFourierInverseReal(FourierData c, double* max_imag) {
  const std::shared_ptr<const SpectralBasis> basis = c.basis_ptr();
  const std::size_t n = static_cast<std::size_t>(basis->order());
  const int arity = c.arity();
  std::vector<Complex> buf = std::move(c).release();
  const std::size_t total = buf.size();
  if (arity > 1) {
    std::vector<Complex> other(total);
    for (int axis = arity - 1; axis >= 1; --axis) {
      const std::size_t inner = Power(n, axis);
      ApplyAxis(basis->inverse(), buf.data(), other.data(), n, inner, total / (n * inner));
      buf.swap(other);
    }
  }
  std::vector<double> out(total);
  InverseAxis0Real(*basis, buf.data(), out.data(), total / n, max_imag);
  return out;
}

FourierData FourierForward(std::span<const Complex> f, std::shared_ptr<const SpectralBasis> basis) {
  return ProductFourierForward(f, 1, std::move(basis));
}

FourierData FourierForward(std::span<const double> f, std::shared_ptr<const SpectralBasis> basis) {
  return ProductFourierForward(f, 1, std::move(basis));
}

std::vector<Complex> FourierInverse(const FourierData& c) {
  if (c.arity() != 1) throw std::invalid_argument("FourierInverse: expected a single group");
  return ProductFourierInverse(c);
}

namespace {

template <class Op>
void ForEachBlockMatrix(FourierData& a, Op&& op) {
  std::span<Complex> data = a.mutable_data();
  ComplexMatrix blk;
  ForEachBlock(a.basis(), a.arity(), [&](const BlockLayout& b) {
    const auto d = static_cast<Eigen::Index>(b.row.size());
    blk.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) blk(i, j) = data[b.base + b.row[i] + b.col[j]];
    op(b, blk);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) data[b.base + b.row[i] + b.col[j]] = blk(i, j);
  });
}

}  // namespace

void MultiplyCoefficientsInPlace(FourierData& a, const FourierData& b) {
  if (a.basis_ptr() != b.basis_ptr() && a.basis().irreps_ptr() != b.basis().irreps_ptr()) {
    throw std::invalid_argument("MultiplyCoefficients: different bases");
  }
  if (a.arity() != b.arity()) throw std::invalid_argument("MultiplyCoefficients: arity mismatch");
  const double g = static_cast<double>(a.size());
  std::span<const Complex> bd = b.data();
  ComplexMatrix rhs, prod;
  ForEachBlockMatrix(a, [&](const BlockLayout& lay, ComplexMatrix& blk) {
    const auto d = blk.rows();
    rhs.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) rhs(i, j) = bd[lay.base + lay.row[i] + lay.col[j]];
    prod.noalias() = blk * rhs;
    blk = g * prod;
  });
}

void SquareCoefficientsInPlace(FourierData& a) {
  const double g = static_cast<double>(a.size());
  ComplexMatrix prod;
  ForEachBlockMatrix(a, [&](const BlockLayout&, ComplexMatrix& blk) {
    prod.noalias() = blk * blk;
    blk = g * prod;
  });
}

ConvolutionEngine ResolveEngine(std::size_t states, ConvolutionEngine engine,
                                std::size_t threshold) {
  if (engine != ConvolutionEngine::kAuto) return engine;
  return states > threshold ? ConvolutionEngine::kFourier : ConvolutionEngine::kDirect;
}

Dist ConvolveDirect(const Dist& p, const Dist& q) {
  if (!p.space().SameSpace(q.space())) throw std::invalid_argument("convolve: space mismatch");
  const ProductGroup& space = p.space();
  CheckDenseBudget(space);
  const GroupTable& h = space.base();
  const std::size_t n = static_cast<std::size_t>(h.order());
  const int m = space.arity();
  const std::size_t total = space.size();
  const std::size_t rows = total / n;
  std::vector<double> out(total, 0.0);
  // left[c][x] = flat offset of y_c^{-1} x in coordinate c.
  std::vector<std::vector<std::size_t>> left(m, std::vector<std::size_t>(n));
  std::vector<std::size_t> digit(m, 0);
  const double* qv = q.values().data();
  for (std::size_t y = 0; y < total; ++y) {
    const double py = p[y];
    if (py == 0.0) continue;
    for (int c = 0; c < m; ++c) {
      std::span<const Element> row = h.row(h.inv(space.Coordinate(y, c)));
      const std::size_t stride = space.stride(c);
      for (std::size_t x = 0; x < n; ++x) left[c][x] = static_cast<std::size_t>(row[x]) * stride;
    }
    const std::size_t* l0 = left[0].data();
    std::fill(digit.begin(), digit.end(), 0);
    std::size_t off = 0;
    for (int c = 1; c < m; ++c) off += left[c][0];
    for (std::size_t hrow = 0; hrow < rows; ++hrow) {
      double* dst = out.data() + hrow * n;
      const double* src = qv + off;
      for (std::size_t x = 0; x < n; ++x) dst[x] += py * src[l0[x]];
      for (int c = 1; c < m; ++c) {
        off -= left[c][digit[c]];
        if (++digit[c] < n) {
          off += left[c][digit[c]];
          break;
        }
        digit[c] = 0;
        off += left[c][0];
      }
    }
  }
  return Dist(space, std::move(out));
}

Dist DistFromSpectrum(FourierData c, const ProductGroup& space) {
  if (c.size() != space.size()) throw std::invalid_argument("DistFromSpectrum: size mismatch");
  std::vector<double> v = ProductFourierInverseReal(std::move(c));
  for (double& x : v)
    if (x < 0.0 && x >= -kSpectralClamp) x = 0.0;
  return Dist(space, std::move(v));
}

Dist ConvolveFourier(const Dist& p, const Dist& q, std::shared_ptr<const SpectralBasis> basis) {
  if (!p.space().SameSpace(q.space())) throw std::invalid_argument("convolve: space mismatch");
  if (!basis) throw std::invalid_argument("ConvolveFourier: irreps required");
  CheckBasis(p.space(), *basis);
  CheckDenseBudget(p.space());
  const int m = p.space().arity();
  FourierData a = ProductFourierForward(p.values(), m, basis);
  if (&p == &q) {
    SquareCoefficientsInPlace(a);
  } else {
    const FourierData b = ProductFourierForward(q.values(), m, basis);
    MultiplyCoefficientsInPlace(a, b);
  }
  return DistFromSpectrum(std::move(a), p.space());
}

Dist Convolve(const Dist& p, const Dist& q, std::shared_ptr<const SpectralBasis> basis,
              ConvolutionEngine engine) {
  const ConvolutionEngine e = ResolveEngine(p.size(), engine);
  if (e == ConvolutionEngine::kFourier && basis) return ConvolveFourier(p, q, std::move(basis));
  if (e == ConvolutionEngine::kFourier) {
    throw std::invalid_argument("Fourier engine selected but no irreps supplied");
  }
  return ConvolveDirect(p, q);
}

std::vector<SubsetSpectrum> LowWeightSpectra(const Dist& p, int k,
                                             std::shared_ptr<const SpectralBasis> basis) {
  return LowWeightSpectra(p.space(), p.values(), k, std::move(basis));
}

std::vector<SubsetSpectrum> LowWeightSpectra(const ProductGroup& space,
                                             std::span<const double> values, int k,
                                             std::shared_ptr<const SpectralBasis> basis) {
  if (!basis) throw std::invalid_argument("LowWeightSpectra: irreps required");
  CheckBasis(space, *basis);
  const int m = space.arity();
  if (k < 1 || k > m) throw std::invalid_argument("low-weight coefficients need 1 <= k <= m");
  std::vector<SubsetSpectrum> out;
  for (int j = 1; j <= k; ++j) {
    for (const auto& s : Subsets(m, j)) {
      const std::vector<double> marginal = MarginalizeValues<double>(space, values, s);
      out.push_back({s, ProductFourierForward(std::span<const double>(marginal), j, basis)});
    }
  }
  return out;
}

namespace {

// Visits blocks of a subset spectrum whose components are all non-trivial.
template <class F>
void ForEachFullWeightBlock(const SubsetSpectrum& ss, F&& f) {
  const SpectralBasis& basis = ss.spectrum.basis();
  const int j = ss.spectrum.arity();
  const int r_count = basis.num_irreps();
  if (r_count < 2) return;
  std::vector<int> idx(j, 1);
  while (true) {
    f(LayoutOf(basis, j, idx));
    int c = 0;
    while (c < j && ++idx[c] == r_count) idx[c++] = 1;
    if (c == j) break;
  }
}

}  // namespace

std::vector<LowWeightCoefficient> LowWeightCoefficients(
    const Dist& p, int k, std::shared_ptr<const SpectralBasis> basis) {
  const int m = p.space().arity();
  const double n = basis ? basis->order() : 1.0;
  std::vector<LowWeightCoefficient> out;
  for (const SubsetSpectrum& ss : LowWeightSpectra(p, k, basis)) {
    const double scale = std::pow(n, -(m - static_cast<int>(ss.coords.size())));
    ForEachFullWeightBlock(ss, [&](const BlockLayout& b) {
      LowWeightCoefficient c;
      c.index.assign(m, 0);
      for (std::size_t t = 0; t < ss.coords.size(); ++t) c.index[ss.coords[t]] = b.index[t];
      c.value = scale * ss.spectrum.Coefficient(b.index);
      out.push_back(std::move(c));
    });
  }
  return out;
}

LowWeightMax MaxLowWeightNorm(const Dist& p, int k, std::shared_ptr<const SpectralBasis> basis) {
  return MaxLowWeightNorm(p.space(), p.values(), k, std::move(basis));
}

LowWeightMax MaxLowWeightNorm(const ProductGroup& space, std::span<const double> values, int k,
                              std::shared_ptr<const SpectralBasis> basis) {
  const int m = space.arity();
  LowWeightMax best;
  best.argmax.assign(m, 0);
  const double n = basis ? basis->order() : 1.0;
  for (const SubsetSpectrum& ss : LowWeightSpectra(space, values, k, basis)) {
    const double scale = std::pow(n, -(m - static_cast<int>(ss.coords.size())));
    std::span<const Complex> d = ss.spectrum.data();
    ForEachFullWeightBlock(ss, [&](const BlockLayout& b) {
      double sq = 0.0;
      for (std::size_t r : b.row)
        for (std::size_t c : b.col) sq += std::norm(d[b.base + r + c]);
      const double norm = scale * std::sqrt(sq);
      if (norm > best.norm) {
        best.norm = norm;
        best.argmax.assign(m, 0);
        for (std::size_t t = 0; t < ss.coords.size(); ++t) best.argmax[ss.coords[t]] = b.index[t];
      }
    });
  }
  return best;
}

}  // namespace quasimix
