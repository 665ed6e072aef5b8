#ifndef QUASIMIX_REPAIR_H_
#define QUASIMIX_REPAIR_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "quasimix/dist.h"
#include "quasimix/fourier.h"

namespace quasimix {

inline constexpr double kRealnessTol = 1e-12;
inline constexpr double kRepairSumTol = 1e-10;
inline constexpr double kRepairResidualTol = 1e-12;
inline constexpr double kRepairDistanceSlack = 1e-10;

class RealnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RepairError : public std::runtime_error {
 public:
  RepairError(const std::string& what, double eps) : std::runtime_error(what), eps_(eps) {}
  double eps() const { return eps_; }

 private:
  double eps_;
};

struct LowPart {
  std::vector<double> values;  // l(x)
  double max_imag = 0.0;       // max |Im l(x)| before it was discarded
};

// l(x) = sum over 1 <= |rho| <= k of d_rho tr(p-hat(rho) rho(x)^T), built
// from one marginal spectrum per coordinate subset. Throws RealnessError
// when max |Im l| > 1e-12.
LowPart ComputeLowPart(const Dist& p, int k, std::shared_ptr<const SpectralBasis> basis);

enum class RepairMode { kPaperFormula, kAdaptive };
std::string ToString(RepairMode mode);
RepairMode ParseRepairMode(const std::string& text);

struct RepairOptions {
  RepairMode mode = RepairMode::kPaperFormula;
  // Paper-formula beta = (m|H|)^{2k} eps can reach 1 at desk scale. By
  // default beta is then capped at 1 (q = uniform, flagged as saturated);
  // with `strict` a RepairError is thrown instead.
  bool strict = false;
};

struct RepairCheck {
  std::string name;
  bool passed = true;
};

struct RepairCertificate {
  RepairMode mode = RepairMode::kPaperFormula;
  int k = 0;
  double eps_in = 0.0;             // G max |p-hat(rho)|_2 over 1 <= |rho| <= k
  double beta = 0.0;               // mixing weight used
  double beta_raw = 0.0;           // (m|H|)^{2k} eps (paper formula)
  bool beta_saturated = false;
  double l1_distance = 0.0;        // |p - q|_1
  double bound = 0.0;              // 3 (m|H|)^{2k} eps
  double k_uniform_residual = 0.0; // G max |q-hat(rho)|_2 over 1 <= |rho| <= k
  double q_min = 0.0;
  double q_sum_error = 0.0;
  double imag_residual = 0.0;
  double low_part_linf = 0.0;
  double low_part_bound = 0.0;     // (m|H|)^{2k} eps / G
  std::vector<RepairCheck> checks;

  bool ok() const;
  // key=value lines, fixed order.
  std::string ToText() const;
};

struct RepairResult {
  Dist q;
  RepairCertificate certificate;
};

RepairResult Repair(const Dist& p, int k, std::shared_ptr<const SpectralBasis> basis,
                    const RepairOptions& options = {});

// Recomputes every certificate field from (p, q, k). beta is recovered as
// the least-squares weight of u - p' in q - p'.
RepairCertificate VerifyRepair(const Dist& p, std::span<const double> q, int k,
                               std::shared_ptr<const SpectralBasis> basis,
                               RepairMode mode = RepairMode::kPaperFormula);
RepairCertificate VerifyRepair(const Dist& p, const Dist& q, int k,
                               std::shared_ptr<const SpectralBasis> basis,
                               RepairMode mode = RepairMode::kPaperFormula);

}  // namespace quasimix

#endif  // QUASIMIX_REPAIR_H_
