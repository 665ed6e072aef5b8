#include "quasimix/repr.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/Eigenvalues>

namespace quasimix {
namespace {

using Eigen::Index;

ComplexMatrix RandomHermitian(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix b(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) b(i, j) = Complex(normal(rng), normal(rng));
  return (b + b.adjoint()) * 0.5;
}

// Restriction of the regular representation to span(V): V^* R(g) V with
// R(g) e_x = e_{gx}, i.e. (R(g) V) row y = V row g^{-1} y.
ComplexMatrix Restrict(const GroupTable& g, const ComplexMatrix& basis, Element x) {
  const int n = g.order();
  const Element xi = g.inv(x);
  ComplexMatrix moved(n, basis.cols());
  for (int y = 0; y < n; ++y) moved.row(y) = basis.row(g.mul(xi, y));
  return basis.adjoint() * moved;
}

std::vector<Complex> CharacterOf(const GroupTable& g, const ComplexMatrix& basis) {
  const int n = g.order();
  std::vector<Complex> chi(n);
  for (Element x = 0; x < n; ++x) {
    // tr(V^* R(x) V) = sum_y sum_k conj(V[xy, k]) V[y, k]
    Complex t = 0.0;
    for (int y = 0; y < n; ++y) t += basis.row(g.mul(x, y)).dot(basis.row(y));
    chi[x] = t;
  }
  return chi;
}

double CharacterNorm(const std::vector<Complex>& chi) {
  double s = 0.0;
  for (const Complex& c : chi) s += std::norm(c);
  return s / static_cast<double>(chi.size());
}

double CharacterDistance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

// Eigenspaces of a Hermitian matrix, clustered by relative gap.
std::vector<ComplexMatrix> Eigenspaces(const ComplexMatrix& t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(t);
  if (solver.info() != Eigen::Success) throw IrrepError("eigensolver failed; try a different seed");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  const Index dim = values.size();
  const double scale = std::max({std::abs(values(0)), std::abs(values(dim - 1)), 1e-300});
  std::vector<ComplexMatrix> spaces;
  Index start = 0;
  for (Index i = 1; i <= dim; ++i) {
    if (i == dim || values(i) - values(i - 1) > kEigenClusterGap * scale) {
      spaces.push_back(vectors.middleCols(start, i - start));
      start = i;
    }
  }
  return spaces;
}

struct Piece {
  ComplexMatrix basis;  // n x d, orthonormal columns
  std::vector<Complex> character;
};

class Splitter {
 public:
  Splitter(const GroupTable& g, std::uint64_t seed) : g_(g), rng_(seed) {}

  // Appends irreducible invariant subspaces of span(basis) to `out`.
  void Split(const ComplexMatrix& basis, std::vector<Piece>& out, int depth = 0) {
    auto chi = CharacterOf(g_, basis);
    const double norm = CharacterNorm(chi);
    const double rounded = std::round(norm);
    if (std::abs(norm - rounded) > kIntegralitySlack || rounded < 1.0) {
      throw IrrepError("character norm " + std::to_string(norm) +
                       " is not a positive integer; try a different seed");
    }
    if (rounded == 1.0) {
      out.push_back({basis, std::move(chi)});
      return;
    }
    constexpr int kMaxAttempts = 4;
    if (depth > 64) throw IrrepError("decomposition did not converge; try a different seed");
    const int n = g_.order();
    const Index dim = basis.cols();
    std::vector<ComplexMatrix> rho(n);
    for (Element x = 0; x < n; ++x) rho[x] = Restrict(g_, basis, x);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const ComplexMatrix a = RandomHermitian(dim, rng_);
      ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
      for (Element x = 0; x < n; ++x) t.noalias() += rho[x] * a * rho[x].adjoint();
      t /= static_cast<double>(n);
      auto spaces = Eigenspaces((t + t.adjoint()) * 0.5);
      if (spaces.size() < 2) continue;
      for (const auto& w : spaces) Split(basis * w, out, depth + 1);
      return;
    }
    throw IrrepError("could not split a reducible subspace of dimension " + std::to_string(dim) +
                     "; try a different seed");
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const GroupTable& g_;
  std::mt19937_64 rng_;
};

// Strict weak order on characters with a rounding tolerance.
bool CharacterLess(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  constexpr double kTie = 1e-6;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].real() - b[i].real()) > kTie) return a[i].real() < b[i].real();
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].imag() - b[i].imag()) > kTie) return a[i].imag() < b[i].imag();
  }
  return false;
}

bool IsTrivialCharacter(const std::vector<Complex>& chi) {
  return std::all_of(chi.begin(), chi.end(),
                     [](const Complex& c) { return std::abs(c - 1.0) < 1e-6; });
}

}  // namespace

IrrepSet::IrrepSet(std::shared_ptr<const GroupTable> group, std::vector<Irrep> irreps, double tol)
    : group_(std::move(group)), irreps_(std::move(irreps)), tol_(tol) {
  if (!group_) throw std::invalid_argument("IrrepSet: null group");
  for (const auto& r : irreps_) {
    if (r.dim < 1 || r.matrices.size() != static_cast<std::size_t>(group_->order()) ||
        r.character.size() != static_cast<std::size_t>(group_->order())) {
      throw std::invalid_argument("IrrepSet: irrep has inconsistent sizes");
    }
    for (const auto& m : r.matrices) {
      if (m.rows() != r.dim || m.cols() != r.dim) {
        throw std::invalid_argument("IrrepSet: matrix dimension mismatch");
      }
    }
  }
}

std::vector<int> IrrepSet::dims() const {
  std::vector<int> d;
  d.reserve(irreps_.size());
  for (const auto& r : irreps_) d.push_back(r.dim);
  return d;
}

long long IrrepSet::SumOfSquares() const {
  long long s = 0;
  for (const auto& r : irreps_) s += static_cast<long long>(r.dim) * r.dim;
  return s;
}

IrrepSet ComputeIrreps(std::shared_ptr<const GroupTable> group, double tol, std::uint64_t seed) {
  if (!group) throw std::invalid_argument("ComputeIrreps: null group");
  if (!(tol >= kMinIrrepTol && tol <= kMaxIrrepTol)) {
    throw std::invalid_argument("ComputeIrreps: tol must lie in [1e-12, 1e-6]");
  }
  const GroupTable& g = *group;
  const int n = g.order();

  Splitter splitter(g, seed);
  // Average a random Hermitian A over the regular representation:
  // T_ij = (1/n) sum_h A[h i, h j] commutes with every R(g).
  const ComplexMatrix a = RandomHermitian(n, splitter.rng());
  ComplexMatrix t = ComplexMatrix::Zero(n, n);
  for (Element h = 0; h < n; ++h) {
    const auto row = g.row(h);
    for (int j = 0; j < n; ++j) {
      const Index hj = row[j];
      for (int i = 0; i < n; ++i) t(i, j) += a(row[i], hj);
    }
  }
  t /= static_cast<double>(n);

  std::vector<Piece> pieces;
  for (const auto& space : Eigenspaces(t)) splitter.Split(space, pieces);

  // One representative per character.
  const double same_threshold = 10.0 * tol * n;
  std::vector<Piece> unique;
  for (auto& p : pieces) {
    bool seen = false;
    for (const auto& u : unique) {
      if (u.basis.cols() == p.basis.cols() &&
          CharacterDistance(u.character, p.character) <= same_threshold) {
        seen = true;
        break;
      }
    }
    if (!seen) unique.push_back(std::move(p));
  }

  std::stable_sort(unique.begin(), unique.end(), [](const Piece& x, const Piece& y) {
    const bool tx = IsTrivialCharacter(x.character), ty = IsTrivialCharacter(y.character);
    if (tx != ty) return tx;
    if (x.basis.cols() != y.basis.cols()) return x.basis.cols() < y.basis.cols();
    return CharacterLess(x.character, y.character);
  });

  long long sum_sq = 0;
  for (const auto& p : unique) sum_sq += static_cast<long long>(p.basis.cols()) * p.basis.cols();
  if (sum_sq != n) {
    throw IrrepError("incomplete decomposition: sum of squared dimensions is " +
                     std::to_string(sum_sq) + ", expected " + std::to_string(n) +
                     "; try a different seed");
  }

  std::vector<Irrep> irreps;
  irreps.reserve(unique.size());
  for (const auto& p : unique) {
    Irrep r;
    r.dim = static_cast<int>(p.basis.cols());
    r.matrices.resize(n);
    for (Element x = 0; x < n; ++x) r.matrices[x] = Restrict(g, p.basis, x);
    r.matrices[0] = ComplexMatrix::Identity(r.dim, r.dim);
    r.character.resize(n);
    for (Element x = 0; x < n; ++x) r.character[x] = r.matrices[x].trace();
    irreps.push_back(std::move(r));
  }

  IrrepSet set(group, std::move(irreps), tol);
  const IrrepReport report = ValidateIrreps(set, tol);
  for (const auto& c : report.checks) {
    if (!c.passed) {
      throw IrrepError("computed irreps fail the " + c.name + " check (residual " +
                       std::to_string(c.residual) + "); try a different seed");
    }
  }
  return set;
}

bool IrrepReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ResidualCheck& c) { return c.passed; });
}

const ResidualCheck* IrrepReport::Find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double HomomorphismResidual(const Irrep& rho, const GroupTable& g, std::uint64_t seed) {
  const int n = g.order();
  double worst = 0.0;
  auto check = [&](Element x, Element y) {
    worst = std::max(worst, (rho.matrices[x] * rho.matrices[y] - rho.matrices[g.mul(x, y)]).norm());
  };
  if (n <= kExhaustiveAssociativityLimit) {
    for (Element x = 0; x < n; ++x)
      for (Element y = 0; y < n; ++y) check(x, y);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Element> pick(0, n - 1);
    for (int i = 0; i < 100'000; ++i) {
      const Element x = pick(rng);
      check(x, pick(rng));
    }
  }
  return worst;
}

double UnitarityResidual(const Irrep& rho) {
  double worst = 0.0;
  const ComplexMatrix id = ComplexMatrix::Identity(rho.dim, rho.dim);
  for (const auto& m : rho.matrices) worst = std::max(worst, (m * m.adjoint() - id).norm());
  return worst;
}

ResidualCheck VerifySchur(const IrrepSet& s, double tol) {
  const int n = s.group().order();
  long long cols = 0;
  for (const auto& r : s.irreps()) cols += static_cast<long long>(r.dim) * r.dim;
  // Column (rho, k, h) holds rho(x)_{kh} for x = 0..n-1.
  ComplexMatrix u(n, cols);
  std::vector<int> owner;
  std::vector<double> inv_dim;
  owner.reserve(cols);
  Index c = 0;
  for (int r = 0; r < s.size(); ++r) {
    const Irrep& rho = s[r];
    for (int k = 0; k < rho.dim; ++k) {
      for (int h = 0; h < rho.dim; ++h, ++c) {
        for (Element x = 0; x < n; ++x) u(x, c) = rho.matrices[x](k, h);
        owner.push_back(r);
        inv_dim.push_back(1.0 / rho.dim);
      }
    }
  }
  const ComplexMatrix gram = (u.transpose() * u.conjugate()) / static_cast<double>(n);
  double worst = 0.0;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < cols; ++i) {
      const double expected = (i == j) ? inv_dim[i] : 0.0;
      worst = std::max(worst, std::abs(gram(i, j) - expected));
    }
  }
  return {"schur", worst, tol, worst <= tol};
}

IrrepReport ValidateIrreps(const IrrepSet& s, double tol) {
  const GroupTable& g = s.group();
  const int n = g.order();
  IrrepReport report;

  double id_res = 0.0, hom_res = 0.0, uni_res = 0.0, char_res = 0.0;
  for (const auto& rho : s.irreps()) {
    id_res = std::max(id_res, (rho.matrices[0] - ComplexMatrix::Identity(rho.dim, rho.dim)).norm());
    hom_res = std::max(hom_res, HomomorphismResidual(rho, g));
    uni_res = std::max(uni_res, UnitarityResidual(rho));
    for (Element x = 0; x < n; ++x) {
      char_res = std::max(char_res, std::abs(rho.matrices[x].trace() - rho.character[x]));
    }
  }
  report.checks.push_back({"identity", id_res, tol, id_res <= tol});
  report.checks.push_back({"homomorphism", hom_res, tol, hom_res <= tol});
  report.checks.push_back({"unitarity", uni_res, tol, uni_res <= tol});
  report.checks.push_back({"character", char_res, tol, char_res <= tol});

  const double completeness = std::abs(static_cast<double>(s.SumOfSquares() - n));
  report.checks.push_back({"completeness", completeness, 0.0, completeness == 0.0});

  // Distinct irreps have character distance sqrt(2n); require >= 10 tol n.
  double min_dist = std::numeric_limits<double>::infinity();
  for (int a = 0; a < s.size(); ++a)
    for (int b = a + 1; b < s.size(); ++b)
      min_dist = std::min(min_dist, CharacterDistance(s[a].character, s[b].character));
  const double threshold = 10.0 * tol * n;
  ResidualCheck inequiv{"inequivalence", s.size() > 1 ? min_dist : 0.0, threshold,
                        s.size() <= 1 || min_dist >= threshold};
  report.checks.push_back(inequiv);

  report.checks.push_back(VerifySchur(s, tol));
  return report;
}

int QuasirandomnessDegree(const IrrepSet& s) {
  if (s.size() <= 1) return 1;
  int d = s[1].dim;
  for (int i = 1; i < s.size(); ++i) d = std::min(d, s[i].dim);
  return d;
}

}  // namespace quasimix
