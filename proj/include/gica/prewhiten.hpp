#ifndef GICA_PREWHITEN_HPP
#define GICA_PREWHITEN_HPP

#include <optional>

#include "gica/types.hpp"

namespace gica {

// Location/scatter fit by the gamma-divergence fixed point.  gamma = 0
// reduces to the sample mean and (1/n)-covariance.
struct WhiteningModel {
  Vector mu;
  Matrix sigma;
  Matrix sigma_inv_sqrt;
  double gamma = 0.0;
  int iterations = 0;
  bool converged = false;
};

// exp(-1/2 (x-mu)^T Sigma^{-1} (x-mu)), in (0, 1].
double gaussian_weight(const Vector& x, const Vector& mu, const Matrix& sigma);

struct PrewhitenInit {
  Vector mu;
  Matrix sigma;
};

// Alternates the weighted mean/scatter updates until the larger of the
// relative mu-change and relative Frobenius sigma-change drops below tol.
// data holds one observation per column.  Starts from the moment estimates
// unless an explicit init is given.
WhiteningModel prewhiten_fixed_point(
    const Matrix& data, double gamma, double tol = 1e-8, int max_iter = 500,
    const std::optional<PrewhitenInit>& init = std::nullopt);

// z_i = sigma^{-1/2} (x_i - mu), columnwise.
Matrix whiten(const Matrix& data, const WhiteningModel& model);

}  // namespace gica

#endif  // GICA_PREWHITEN_HPP
