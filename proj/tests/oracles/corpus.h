#ifndef QUASIMIX_TESTS_ORACLES_CORPUS_H_
#define QUASIMIX_TESTS_ORACLES_CORPUS_H_

#include <random>
#include <vector>

#include "quasimix/dist.h"

namespace quasimix::oracle {

// p(x) = w(x_{c_0} x_{c_1} ... x_{c_{j-1}}) / |H|^{m-1} with every other
// coordinate free. Exactly (j-1)-uniform; j-uniform only when w is uniform.
std::vector<double> ProductConstraintDist(const ProductGroup& space, const std::vector<int>& coords,
                                          const std::vector<double>& w);

// (1 - t) u + t r for a random distribution r.
std::vector<double> NearUniform(std::size_t size, double t, std::mt19937_64& rng);

// Mixed corpus over `space` for the Fourier/marginal equivalence check:
// random dense, near-uniform, and product-constraint distributions of every
// constraint width, so that each k in [1, m) sees both verdicts.
std::vector<std::vector<double>> EquivalenceCorpus(const ProductGroup& space, int count,
                                                   std::mt19937_64& rng);

}  // namespace quasimix::oracle

#endif  // QUASIMIX_TESTS_ORACLES_CORPUS_H_
