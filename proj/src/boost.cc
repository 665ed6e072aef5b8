#include "quasimix/boost.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

#include "quasimix/uniformity.h"

namespace quasimix {
namespace {

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void CheckSameSpace(const Dist& p, const Dist& q) {
  if (!p.space().SameSpace(q.space())) throw std::invalid_argument("space mismatch");
}

}  // namespace

double L2SqDistToUniform(const Dist& p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double s = 0.0;
  for (double v : p.values()) s += (v - u) * (v - u);
  return s;
}

double L2SqViaNorm(const Dist& p) {
  double s = 0.0;
  for (double v : p.values()) s += v * v;
  return s - 1.0 / static_cast<double>(p.size());
}

bool AtNumericalFloor(double l2_sq, std::size_t states) {
  const double g = static_cast<double>(states);
  return std::sqrt(g * l2_sq) <= 10.0 * std::numeric_limits<double>::epsilon() * g;
}

double TvDistToUniform(const Dist& p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double s = 0.0;
  for (double v : p.values()) s += std::abs(v - u);
  return 0.5 * s;
}

FlattenRecord FlattenBoundCheck(const Dist& p, int k, int d,
                                std::shared_ptr<const SpectralBasis> basis,
                                ConvolutionEngine engine) {
  const int m = p.space().arity();
  if (d < 1) throw std::invalid_argument("quasirandomness degree must be >= 1");
  const double h = p.space().base_order();
  FlattenRecord r;
  r.eps_k = EpsKUniform(p, k).eps;
  const double required = std::pow(h, -k);
  if (r.eps_k > required) {
    throw PreconditionError("flatten: input is not (H^-k, k)-uniform: eps_" + std::to_string(k) +
                                " = " + Num(r.eps_k) + " > " + Num(required),
                            r.eps_k);
  }
  const double before = L2SqDistToUniform(p);
  const Dist pp = Convolve(p, p, std::move(basis), engine);
  r.lhs = L2SqDistToUniform(pp);
  r.factor = 2.0 * std::pow(h, m - k) * std::pow(static_cast<double>(d), -(k + 1));
  r.rhs = before * r.factor;
  if (!AtNumericalFloor(before, p.size())) r.ratio = r.lhs / before;
  r.holds = r.lhs <= r.rhs + kInequalitySlack;
  return r;
}

SquareBoostRecord SquareBoostCheck(const Dist& p, const Dist& q, int k,
                                   std::shared_ptr<const SpectralBasis> basis,
                                   ConvolutionEngine engine) {
  CheckSameSpace(p, q);
  SquareBoostRecord r;
  r.eps_p = EpsKUniform(p, k).eps;
  r.eps_q = EpsKUniform(q, k).eps;
  r.eps_conv = EpsKUniform(Convolve(p, q, std::move(basis), engine), k).eps;
  r.holds = r.eps_conv <= r.eps_p * r.eps_q + kInequalitySlack;
  return r;
}

LinfRecord L2ToLinfCheck(const Dist& p, std::shared_ptr<const SpectralBasis> basis,
                         ConvolutionEngine engine) {
  LinfRecord r;
  r.l2sq = L2SqDistToUniform(p);
  const Dist pp = Convolve(p, p, std::move(basis), engine);
  const double u = 1.0 / static_cast<double>(p.size());
  for (double v : pp.values()) r.linf = std::max(r.linf, std::abs(v - u));
  r.holds = r.linf <= r.l2sq + kLinfSlack;
  return r;
}

std::string ToString(BoostMode mode) {
  return mode == BoostMode::kSelfSquare ? "self-square" : "fresh-copy";
}

BoostMode ParseBoostMode(const std::string& text) {
  if (text == "self-square") return BoostMode::kSelfSquare;
  if (text == "fresh-copy") return BoostMode::kFreshCopy;
  throw std::invalid_argument("mode must be self-square or fresh-copy, got '" + text + "'");
}

std::string ExperimentLog::ToCsv(bool timing) const {
  std::string out = "step,mode,l2_sq,linf_rel";
  for (int k : ks_) out += ",eps_k" + std::to_string(k);
  out += ",tv_dist,seconds\n";
  for (const StepRecord& r : steps_) {
    out += std::to_string(r.step) + ',' + ToString(r.mode) + ',' + Num(r.l2_sq) + ',' +
           Num(r.linf_rel);
    for (double e : r.eps_k) out += ',' + Num(e);
    out += ',' + Num(r.tv_dist) + ',' + (timing ? Num(r.seconds) : std::string("0")) + '\n';
  }
  return out;
}

void ExperimentLog::WriteCsv(const std::string& path, bool timing) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << ToCsv(timing);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

StepRecord MeasureStep(const Dist& p, int step, BoostMode mode, const std::vector<int>& ks) {
  StepRecord r;
  r.step = step;
  r.mode = mode;
  r.l2_sq = L2SqDistToUniform(p);
  r.linf_rel = EpsUniform(p);
  for (int k : ks) r.eps_k.push_back(EpsKUniform(p, k).eps);
  r.tv_dist = TvDistToUniform(p);
  return r;
}

BoostResult BoostPipeline(const Dist& p, const BoostConfig& config,
                          std::shared_ptr<const SpectralBasis> basis) {
  if (config.max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  for (int k : config.ks) {
    if (k < 1 || k > p.space().arity()) throw std::invalid_argument("eps_k needs 1 <= k <= m");
  }
  CheckDenseBudget(p.space());
  using Clock = std::chrono::steady_clock;
  const ConvolutionEngine engine = ResolveEngine(p.size(), config.engine);
  if (engine == ConvolutionEngine::kFourier && !basis) {
    throw std::invalid_argument("Fourier engine selected but no irreps supplied");
  }
  const int m = p.space().arity();

  BoostResult result{p, ExperimentLog(config.ks), false, 0, 1};
  auto t0 = Clock::now();
  StepRecord first = MeasureStep(p, 0, config.mode, config.ks);
  first.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  result.log.Add(first);
  result.reached_target = first.linf_rel <= config.target_eps;

  std::optional<FourierData> base, cur;
  if (engine == ConvolutionEngine::kFourier && !result.reached_target && config.max_steps > 0) {
    cur = ProductFourierForward(p.values(), m, basis);
    if (config.mode == BoostMode::kFreshCopy) base = *cur;
  }
  for (int t = 1; t <= config.max_steps && !result.reached_target; ++t) {
    t0 = Clock::now();
    if (cur) {
      if (config.mode == BoostMode::kSelfSquare) {
        SquareCoefficientsInPlace(*cur);
      } else {
        MultiplyCoefficientsInPlace(*cur, *base);
      }
      result.final = DistFromSpectrum(*cur, p.space());
    } else if (config.mode == BoostMode::kSelfSquare) {
      result.final = ConvolveDirect(result.final, result.final);
    } else {
      result.final = ConvolveDirect(result.final, p);
    }
    result.copies = config.mode == BoostMode::kSelfSquare ? result.copies * 2 : result.copies + 1;
    StepRecord r = MeasureStep(result.final, t, config.mode, config.ks);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    result.log.Add(r);
    result.steps = t;
    result.reached_target = r.linf_rel <= config.target_eps;
  }
  return result;
}

}  // namespace quasimix
