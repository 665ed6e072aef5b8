#ifndef QUASIMIX_TESTS_ORACLES_FOURIER_ORACLE_H_
#define QUASIMIX_TESTS_ORACLES_FOURIER_ORACLE_H_

#include <cstdint>
#include <random>
#include <vector>

#include "quasimix/dist.h"
#include "quasimix/repr.h"

namespace quasimix::oracle {

// rho_{m-1}(x_{m-1}) (x) ... (x) rho_0(x_0), built with explicit Kronecker
// products.
ComplexMatrix ProductIrrepMatrix(const IrrepSet& s, const ProductGroup& space,
                                 const std::vector<int>& index, std::size_t flat);

// E_x f(x) conj(rho(x)) by direct summation over H^m.
ComplexMatrix NaiveCoefficient(const IrrepSet& s, const ProductGroup& space,
                               const std::vector<Complex>& f, const std::vector<int>& index);

// sum_rho d_rho tr(c(rho) rho(x)^T) by direct summation; `coeff` is indexed
// by the odometer order over product irreps (coordinate 0 fastest).
std::vector<Complex> NaiveInverse(const IrrepSet& s, const ProductGroup& space,
                                  const std::vector<ComplexMatrix>& coeff);

// All product irrep indices in odometer order.
std::vector<std::vector<int>> AllProductIndices(int num_irreps, int arity);

// out[y z] += p[y] q[z] over all pairs with p[y] != 0.
std::vector<double> PairConvolution(const ProductGroup& space, const std::vector<double>& p,
                                    const std::vector<double>& q);

// Marginal by decoding every flat index into a tuple.
std::vector<double> TupleMarginal(const ProductGroup& space, const std::vector<double>& p,
                                  const std::vector<int>& coords);

// Normalized i.i.d. exponential weights.
std::vector<double> RandomProbabilities(std::size_t size, std::mt19937_64& rng);
// Support of `support` random points with random weights.
std::vector<double> SparseProbabilities(std::size_t size, int support, std::mt19937_64& rng);

}  // namespace quasimix::oracle

#endif  // QUASIMIX_TESTS_ORACLES_FOURIER_ORACLE_H_
