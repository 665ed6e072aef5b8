#include "quasimix/repair.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace quasimix {
namespace {

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// l(x) and Im l(x) without the realness gate.
void LowPartRaw(const ProductGroup& space, std::span<const double> values, int k,
                const std::shared_ptr<const SpectralBasis>& basis, std::vector<double>& re,
                std::vector<double>& im) {
  const int m = space.arity();
  const std::size_t n = static_cast<std::size_t>(space.base_order());
  re.assign(space.size(), 0.0);
  im.assign(space.size(), 0.0);
  for (SubsetSpectrum& ss : LowWeightSpectra(space, values, k, basis)) {
    const int j = static_cast<int>(ss.coords.size());
    const double scale = std::pow(static_cast<double>(n), -(m - j));
    // Keep entries whose spectral digits are all non-trivial (digit != 0).
    std::span<Complex> d = ss.spectrum.mutable_data();
    for (std::size_t s = 0; s < d.size(); ++s) {
      bool full = true;
      std::size_t rest = s;
      for (int c = 0; c < j; ++c, rest /= n) full = full && (rest % n) != 0;
      d[s] = full ? d[s] * scale : Complex(0.0);
    }
    const std::vector<Complex> g = ProductFourierInverse(ss.spectrum);
    // Broadcast g(x_S) over the free coordinates.
    std::vector<std::vector<std::size_t>> contrib(m, std::vector<std::size_t>(n, 0));
    std::size_t stride = 1;
    for (int c : ss.coords) {
      for (std::size_t x = 0; x < n; ++x) contrib[c][x] = x * stride;
      stride *= n;
    }
    const std::size_t rows = space.size() / n;
    std::vector<std::size_t> digit(m, 0);
    std::size_t base = 0;
    const std::size_t* inner = contrib[0].data();
    for (std::size_t h = 0; h < rows; ++h) {
      double* dre = re.data() + h * n;
      double* dim = im.data() + h * n;
      for (std::size_t x = 0; x < n; ++x) {
        const Complex v = g[base + inner[x]];
        dre[x] += v.real();
        dim[x] += v.imag();
      }
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
  }
}

double MaxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

constexpr double kRoundingClamp = 64 * std::numeric_limits<double>::epsilon();

// (m |H|)^{2k}.
double PaperConstant(const ProductGroup& space, int k) {
  return std::pow(static_cast<double>(space.arity()) * space.base_order(), 2.0 * k);
}

}  // namespace

LowPart ComputeLowPart(const Dist& p, int k, std::shared_ptr<const SpectralBasis> basis) {
  LowPart out;
  std::vector<double> im;
  LowPartRaw(p.space(), p.values(), k, basis, out.values, im);
  out.max_imag = MaxAbs(im);
  if (out.max_imag > kRealnessTol) {
    throw RealnessError("low part has imaginary residual " + Num(out.max_imag) + " > 1e-12");
  }
  return out;
}

std::string ToString(RepairMode mode) {
  return mode == RepairMode::kPaperFormula ? "paper-formula" : "adaptive";
}

RepairMode ParseRepairMode(const std::string& text) {
  if (text == "paper-formula" || text == "paper") return RepairMode::kPaperFormula;
  if (text == "adaptive") return RepairMode::kAdaptive;
  throw std::invalid_argument("repair mode must be paper-formula or adaptive, got '" + text + "'");
}

bool RepairCertificate::ok() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string RepairCertificate::ToText() const {
  std::ostringstream out;
  out << "mode=" << ToString(mode) << '\n'
      << "k=" << k << '\n'
      << "eps_in=" << Num(eps_in) << '\n'
      << "beta=" << Num(beta) << '\n'
      << "beta_raw=" << Num(beta_raw) << '\n'
      << "beta_saturated=" << (beta_saturated ? "true" : "false") << '\n'
      << "l1_distance=" << Num(l1_distance) << '\n'
      << "bound=" << Num(bound) << '\n'
      << "k_uniform_residual=" << Num(k_uniform_residual) << '\n'
      << "q_min=" << Num(q_min) << '\n'
      << "q_sum_error=" << Num(q_sum_error) << '\n'
      << "imag_residual=" << Num(imag_residual) << '\n'
      << "low_part_linf=" << Num(low_part_linf) << '\n'
      << "low_part_bound=" << Num(low_part_bound) << '\n';
  for (const auto& c : checks) out << "check_" << c.name << '=' << (c.passed ? "pass" : "fail") << '\n';
  out << "all_pass=" << (ok() ? "true" : "false") << '\n';
  return out.str();
}

RepairCertificate VerifyRepair(const Dist& p, std::span<const double> q, int k,
                               std::shared_ptr<const SpectralBasis> basis, RepairMode mode) {
  const ProductGroup& space = p.space();
  if (q.size() != space.size()) throw std::invalid_argument("VerifyRepair: size mismatch");
  const double g = static_cast<double>(space.size());
  RepairCertificate c;
  c.mode = mode;
  c.k = k;
  c.eps_in = g * MaxLowWeightNorm(p, k, basis).norm;
  c.beta_raw = PaperConstant(space, k) * c.eps_in;
  c.bound = 3.0 * c.beta_raw;
  c.low_part_bound = c.beta_raw / g;

  std::vector<double> l, im;
  LowPartRaw(space, p.values(), k, basis, l, im);
  c.imag_residual = MaxAbs(im);
  c.low_part_linf = MaxAbs(l);

  // beta from q - p' = beta (u - p').
  const double u = 1.0 / g;
  // Extended accumulators: 10^7 terms of size 1/G lose ~1e-10 in double.
  long double num = 0.0, den = 0.0, sum = 0.0, l1 = 0.0;
  c.q_min = q.empty() ? 0.0 : q[0];
  for (std::size_t x = 0; x < q.size(); ++x) {
    const double pp = p[x] - l[x];
    num += static_cast<long double>(q[x] - pp) * (u - pp);
    den += static_cast<long double>(u - pp) * (u - pp);
    l1 += std::abs(p[x] - q[x]);
    c.q_min = std::min(c.q_min, q[x]);
    sum += q[x];
  }
  c.beta = den > 0.0 ? static_cast<double>(num / den) : 0.0;
  c.l1_distance = static_cast<double>(l1);
  c.q_sum_error = static_cast<double>(std::abs(sum - 1.0L));
  c.k_uniform_residual = g * MaxLowWeightNorm(space, q, k, basis).norm;

  c.checks = {
      {"q_nonneg", c.q_min >= 0.0},
      {"q_sum", c.q_sum_error <= kRepairSumTol},
      {"k_uniform", c.k_uniform_residual <= kRepairResidualTol},
      {"distance", c.l1_distance <= c.bound + kRepairDistanceSlack},
      {"realness", c.imag_residual <= kRealnessTol},
      {"low_part_bound", c.low_part_linf <= c.low_part_bound * (1 + 1e-9) + 1e-18},
  };
  return c;
}

RepairCertificate VerifyRepair(const Dist& p, const Dist& q, int k,
                               std::shared_ptr<const SpectralBasis> basis, RepairMode mode) {
  if (!p.space().SameSpace(q.space())) throw std::invalid_argument("VerifyRepair: space mismatch");
  return VerifyRepair(p, q.values(), k, std::move(basis), mode);
}

RepairResult Repair(const Dist& p, int k, std::shared_ptr<const SpectralBasis> basis,
                    const RepairOptions& options) {
  const ProductGroup& space = p.space();
  const double g = static_cast<double>(space.size());
  const double eps = g * MaxLowWeightNorm(p, k, basis).norm;
  const LowPart low = ComputeLowPart(p, k, basis);

  std::vector<double> pp(p.size());
  for (std::size_t x = 0; x < pp.size(); ++x) pp[x] = p[x] - low.values[x];

  const double beta_raw = PaperConstant(space, k) * eps;
  double beta = 0.0;
  bool saturated = false;
  if (options.mode == RepairMode::kPaperFormula) {
    if (beta_raw >= 1.0) {
      if (options.strict) {
        throw RepairError("paper-formula beta = (m|H|)^(2k) eps = " + Num(beta_raw) +
                              " >= 1 (eps = " + Num(eps) + ")",
                          eps);
      }
      beta = 1.0;
      saturated = true;
    } else {
      beta = beta_raw;
    }
  } else {
    const double u = 1.0 / g;
    for (double v : pp)
      if (v < 0.0) beta = std::max(beta, -v / (u - v));
    beta = std::min(beta, std::nextafter(1.0, 0.0));
  }

  std::vector<double> q(pp.size());
  const double uniform_part = beta / g;
  for (std::size_t x = 0; x < q.size(); ++x) {
    q[x] = saturated ? 1.0 / g : (1.0 - beta) * pp[x] + uniform_part;
    // Rounding at the entries the adaptive beta makes exactly zero.
    if (q[x] < 0.0 && q[x] >= -kRoundingClamp / g) q[x] = 0.0;
  }
  RepairCertificate cert = VerifyRepair(p, q, k, basis, options.mode);
  cert.beta = beta;
  cert.beta_saturated = saturated;
  return {Dist(space, std::move(q)), std::move(cert)};
}

}  // namespace quasimix
