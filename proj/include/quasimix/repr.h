#ifndef QUASIMIX_REPR_H_
#define QUASIMIX_REPR_H_

#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "quasimix/groups.h"

namespace quasimix {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultIrrepTol = 1e-9;
inline constexpr double kMinIrrepTol = 1e-12;
inline constexpr double kMaxIrrepTol = 1e-6;
// Eigenvalues of the averaged operator closer than this (relative to the
// spectral radius) are treated as one eigenspace.
inline constexpr double kEigenClusterGap = 1e-8;
// Largest allowed distance of <chi, chi> from an integer.
inline constexpr double kIntegralitySlack = 1e-6;

// Numerical failure while resolving the decomposition; retry with another
// seed.
class IrrepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IrrepFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FingerprintMismatchError : public IrrepFileError {
 public:
  using IrrepFileError::IrrepFileError;
};

// A unitary representation given by one matrix per group element.
struct Irrep {
  int dim = 0;
  std::vector<ComplexMatrix> matrices;
  std::vector<Complex> character;
};

// A complete set of inequivalent unitary irreps: trivial first, then
// ascending dimension. Within one dimension the order is fixed by the
// characters, so it does not depend on the seed.
class IrrepSet {
 public:
  IrrepSet(std::shared_ptr<const GroupTable> group, std::vector<Irrep> irreps, double tol);

  const GroupTable& group() const { return *group_; }
  const std::shared_ptr<const GroupTable>& group_ptr() const { return group_; }
  std::uint64_t group_fingerprint() const { return group_->fingerprint(); }
  double tol() const { return tol_; }

  int size() const { return static_cast<int>(irreps_.size()); }
  const Irrep& operator[](int i) const { return irreps_[i]; }
  const std::vector<Irrep>& irreps() const { return irreps_; }

  std::vector<int> dims() const;
  long long SumOfSquares() const;

 private:
  std::shared_ptr<const GroupTable> group_;
  std::vector<Irrep> irreps_;
  double tol_;
};

// Splits the regular representation with seeded random Hermitian averaging
// and keeps one copy per character. Deterministic in (group, tol, seed).
// Throws IrrepError when eigenvalue clusters cannot be resolved and
// std::invalid_argument for tol outside [1e-12, 1e-6].
IrrepSet ComputeIrreps(std::shared_ptr<const GroupTable> group, double tol = kDefaultIrrepTol,
                       std::uint64_t seed = 1);

struct ResidualCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct IrrepReport {
  std::vector<ResidualCheck> checks;
  bool ok() const;
  const ResidualCheck* Find(std::string_view name) const;
};

// max ||rho(x) rho(y) - rho(xy)||_2, exhaustive for order <= 256 and over
// 10^5 seeded pairs otherwise.
double HomomorphismResidual(const Irrep& rho, const GroupTable& g, std::uint64_t seed = 1);
// max ||rho(x) rho(x)^* - I||_2.
double UnitarityResidual(const Irrep& rho);

// Max deviation of E_x rho(x)_{kh} conj(psi(x)_{ij}) from 1/d_rho on the
// matching diagonal and 0 everywhere else.
ResidualCheck VerifySchur(const IrrepSet& s, double tol);

// Identity, homomorphism, unitarity, completeness (sum d^2 = |G|),
// pairwise inequivalence and Schur orthogonality.
IrrepReport ValidateIrreps(const IrrepSet& s, double tol);

// Smallest dimension of a non-trivial irrep; 1 for the trivial group.
int QuasirandomnessDegree(const IrrepSet& s);

// Text cache format, see README. Doubles are written in shortest
// round-trip form, so save/load is bit-exact.
void SaveIrreps(const IrrepSet& s, const std::string& path);
// Throws FingerprintMismatchError when the file belongs to another group,
// IrrepFileError on parse errors or when a validation check fails (the
// message names the check).
IrrepSet LoadIrreps(const std::string& path, std::shared_ptr<const GroupTable> group);

}  // namespace quasimix

#endif  // QUASIMIX_REPR_H_
