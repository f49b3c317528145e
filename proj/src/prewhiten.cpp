#include "gica/prewhiten.hpp"

#include <cmath>

#include "gica/linalg.hpp"

namespace gica {
namespace {

void moment_estimates(const Matrix& data, Vector& mu, Matrix& sigma) {
  const auto n = data.cols();
  mu = data.rowwise().mean();
  const Matrix centered = data.colwise() - mu;
  sigma = (centered * centered.transpose()) / static_cast<double>(n);
}

// One sweep of Eq.-style weighted updates: mu first, then sigma with the new
// mu, weights frozen from the incoming (mu, sigma).
void weighted_update(const Matrix& data, double gamma, Vector& mu,
                     Matrix& sigma) {
  const int p = static_cast<int>(data.rows());
  const auto n = data.cols();
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw DegenerateScatter("prewhiten: scatter lost positive definiteness");

  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector r = data.col(i) - mu;
    const double quad = r.dot(llt.solve(r));
    w(i) = std::exp(-0.5 * gamma * quad);
  }
  const double wsum = w.sum();
  if (!(wsum > 0.0))
    throw DegenerateScatter("prewhiten: all sample weights underflowed");

  const Vector new_mu = (data * w) / wsum;
  Matrix acc = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector r = data.col(i) - new_mu;
    acc.noalias() += w(i) * (r * r.transpose());
  }
  mu = new_mu;
  sigma = (1.0 + gamma) * acc / wsum;
}

}  // namespace

double gaussian_weight(const Vector& x, const Vector& mu, const Matrix& sigma) {
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("gaussian_weight: sigma not positive definite");
  const Vector r = x - mu;
  return std::exp(-0.5 * r.dot(llt.solve(r)));
}

WhiteningModel prewhiten_fixed_point(const Matrix& data, double gamma,
                                     double tol, int max_iter,
                                     const std::optional<PrewhitenInit>& init) {
  WhiteningModel model;
  model.gamma = gamma;
  if (init && gamma != 0.0) {
    model.mu = init->mu;
    model.sigma = init->sigma;
  } else {
    moment_estimates(data, model.mu, model.sigma);
  }

  if (gamma == 0.0) {
    model.converged = true;
    model.iterations = 0;
  } else {
    for (int it = 1; it <= max_iter; ++it) {
      const Vector mu_prev = model.mu;
      const Matrix sigma_prev = model.sigma;
      weighted_update(data, gamma, model.mu, model.sigma);
      model.iterations = it;
      const double mu_change =
          (model.mu - mu_prev).norm() / std::max(mu_prev.norm(), 1.0);
      const double sigma_change =
          (model.sigma - sigma_prev).norm() / std::max(sigma_prev.norm(), 1e-300);
      if (std::max(mu_change, sigma_change) < tol) {
        model.converged = true;
        break;
      }
    }
  }
  try {
    model.sigma_inv_sqrt = inv_sqrt(model.sigma);
  } catch (const NotPositiveDefinite& e) {
    throw DegenerateScatter(std::string("prewhiten: ") + e.what());
  }
  return model;
}

Matrix whiten(const Matrix& data, const WhiteningModel& model) {
  return model.sigma_inv_sqrt * (data.colwise() - model.mu);
}

}  // namespace gica
