#ifndef QUASIMIX_BOOST_H_
#define QUASIMIX_BOOST_H_

#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quasimix/dist.h"
#include "quasimix/fourier.h"

namespace quasimix {

// Absolute slack on every asserted inequality.
inline constexpr double kInequalitySlack = 1e-12;
inline constexpr double kLinfSlack = kInequalitySlack;

class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, double measured)
      : std::runtime_error(what), measured_(measured) {}
  double measured() const { return measured_; }

 private:
  double measured_;
};

// sum_x (p(x) - 1/G)^2, un-normalized.
double L2SqDistToUniform(const Dist& p);
// |p|_2^2 - 1/G.
double L2SqViaNorm(const Dist& p);
// sqrt(G * l2_sq) <= 10 * machine epsilon * G.
bool AtNumericalFloor(double l2_sq, std::size_t states);
// Total variation distance to uniform: (1/2) sum_x |p(x) - 1/G|.
double TvDistToUniform(const Dist& p);

struct FlattenRecord {
  double lhs = 0.0;     // |p*p - u|_2^2
  double rhs = 0.0;     // |p - u|_2^2 * factor
  double factor = 0.0;  // 2 H^{m-k} d^{-(k+1)}
  std::optional<double> ratio;  // lhs / |p - u|_2^2, absent at the numerical floor
  double eps_k = 0.0;   // measured precondition value
  bool holds = true;
};

// Requires p to be (H^{-k}, k)-uniform; throws PreconditionError otherwise.
FlattenRecord FlattenBoundCheck(const Dist& p, int k, int d,
                                std::shared_ptr<const SpectralBasis> basis,
                                ConvolutionEngine engine = ConvolutionEngine::kAuto);

struct SquareBoostRecord {
  double eps_p = 0.0, eps_q = 0.0, eps_conv = 0.0;
  bool holds = true;  // eps_conv <= eps_p eps_q + slack
};
SquareBoostRecord SquareBoostCheck(const Dist& p, const Dist& q, int k,
                                   std::shared_ptr<const SpectralBasis> basis,
                                   ConvolutionEngine engine = ConvolutionEngine::kAuto);

struct LinfRecord {
  double linf = 0.0;  // max_x |(p*p)(x) - 1/G|
  double l2sq = 0.0;  // |p - u|_2^2
  bool holds = true;
};
LinfRecord L2ToLinfCheck(const Dist& p, std::shared_ptr<const SpectralBasis> basis,
                         ConvolutionEngine engine = ConvolutionEngine::kAuto);

enum class BoostMode { kSelfSquare, kFreshCopy };
std::string ToString(BoostMode mode);
BoostMode ParseBoostMode(const std::string& text);

struct StepRecord {
  int step = 0;
  BoostMode mode = BoostMode::kSelfSquare;
  double l2_sq = 0.0;
  double linf_rel = 0.0;
  std::vector<double> eps_k;  // one per configured k
  double tv_dist = 0.0;
  double seconds = 0.0;
};

class ExperimentLog {
 public:
  explicit ExperimentLog(std::vector<int> ks = {}) : ks_(std::move(ks)) {}
  const std::vector<int>& ks() const { return ks_; }
  const std::vector<StepRecord>& steps() const { return steps_; }
  void Add(StepRecord r) { steps_.push_back(std::move(r)); }

  // Header: step,mode,l2_sq,linf_rel,eps_k<k>...,tv_dist,seconds. Seconds
  // are written as 0 unless `timing` is set, so equal runs give equal bytes.
  std::string ToCsv(bool timing = false) const;
  void WriteCsv(const std::string& path, bool timing = false) const;

 private:
  std::vector<int> ks_;
  std::vector<StepRecord> steps_;
};

// Metrics of one distribution for a log row.
StepRecord MeasureStep(const Dist& p, int step, BoostMode mode, const std::vector<int>& ks);

struct BoostConfig {
  BoostMode mode = BoostMode::kSelfSquare;
  std::vector<int> ks;
  int max_steps = 6;
  double target_eps = 0.0;
  ConvolutionEngine engine = ConvolutionEngine::kAuto;
};

struct BoostResult {
  Dist final;
  ExperimentLog log;
  bool reached_target = false;
  int steps = 0;                 // convolution steps performed
  unsigned long long copies = 1;  // copies of p convolved together
};

// Self-square: p, p*p, (p*p)*(p*p), ...; fresh-copy: p, p*p, p*p*p, ...
// Stops at the first step with EpsUniform <= target_eps or after max_steps.
BoostResult BoostPipeline(const Dist& p, const BoostConfig& config,
                          std::shared_ptr<const SpectralBasis> basis);

}  // namespace quasimix

#endif  // QUASIMIX_BOOST_H_
