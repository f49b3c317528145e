#ifndef GICA_SELECTION_HPP
#define GICA_SELECTION_HPP

#include <cstdint>
#include <vector>

#include "gica/optimizer.hpp"
#include "gica/source_model.hpp"
#include "gica/types.hpp"

namespace gica {

struct CvConfig {
  int k_folds = 5;
  double gamma0 = 1.0;  // anchor
  std::vector<double> grid;
  std::uint64_t seed = 0;
};

struct CvScore {
  double gamma = 0.0;
  double score = 0.0;
  int n_failed_folds = 0;
};

struct CvResult {
  std::vector<CvScore> scores;
  double chosen_gamma = 0.0;
};

// Empirical gamma0 cross-entropy of a Gaussian fit against held-out data,
// reduced to its theta-dependent part: -(1/m) sum (xi(z) / ||xi||_{g0+1})^g0.
double gamma_cross_entropy_gauss(const Matrix& sample, const Vector& mu,
                                 const Matrix& sigma, double gamma0);

// Same reduction for the product ICA model on whitened data; the model norm
// is W-free by orthogonality.
double gamma_cross_entropy_ica(const Matrix& sample, const Matrix& w,
                               const ProductModel& pm, double gamma0);

// Disjoint K-fold partition of n indices, shuffled by seed.
std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k_folds,
                                                  std::uint64_t seed);

CvResult select_gamma_prewhiten(const Matrix& data, const CvConfig& cfg);

// Per-fold fits warm-start from the previous gamma's rotation (grid is
// scanned in ascending order).
CvResult select_gamma_ica(const Matrix& z, const ProductModel& pm,
                          const OptimizerConfig& opt, const CvConfig& cfg);

}  // namespace gica

#endif  // GICA_SELECTION_HPP
