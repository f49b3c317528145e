#include "gica/optimizer.hpp"

#include <cmath>
#include <iostream>

#include "gica/linalg.hpp"

namespace gica {
namespace {

constexpr int kMaxBacktracks = 60;

double objective_from_y(const Matrix& y, const ProductModel& pm, double gamma) {
  const auto n = y.cols();
  double acc = 0.0;
  if (gamma > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i)
      acc += std::exp(gamma * pm.log_density(y.col(i)));
  } else {
    for (Eigen::Index i = 0; i < n; ++i) acc += pm.log_density(y.col(i));
  }
  return acc / static_cast<double>(n);
}

Matrix gradient_from_y(const Matrix& y, const ProductModel& pm, double gamma) {
  const int p = static_cast<int>(y.rows());
  const auto n = y.cols();
  Matrix a = Matrix::Zero(p, p);  // sum of weights * y phi^T
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector yi = y.col(i);
    const Vector phi = pm.score(yi);
    const double wgt =
        gamma > 0.0 ? gamma * std::exp(gamma * pm.log_density(yi)) : 1.0;
    a.noalias() += wgt * (yi * phi.transpose());
  }
  return (a - a.transpose()) / (2.0 * static_cast<double>(n));
}

LineSearchResult search_from_y(const Matrix& y, const Matrix& v,
                               const ProductModel& pm,
                               const OptimizerConfig& config) {
  LineSearchResult res;
  const double base = objective_from_y(y, pm, config.gamma);
  const double slope = v.squaredNorm();  // tr(grad^T V) with V = grad
  double t = config.alpha;
  for (int ell = 0; ell <= kMaxBacktracks; ++ell, t *= config.rho) {
    const Matrix cand = matrix_exp(t * v).transpose() * y;
    const double val = objective_from_y(cand, pm, config.gamma);
    const bool ok = config.step_rule == StepRule::FirstImproved
                        ? val > base
                        : val - base >= config.eta * t * slope;
    if (ok) {
      res.t = t;
      res.backtracks = ell;
      res.improved = true;
      return res;
    }
  }
  res.t = 0.0;
  res.improved = false;
  return res;
}

}  // namespace

double objective(const Matrix& z, const Matrix& w, const ProductModel& pm,
                 double gamma) {
  return objective_from_y(w.transpose() * z, pm, gamma);
}

Matrix projected_gradient(const Matrix& z, const Matrix& w,
                          const ProductModel& pm, double gamma) {
  return gradient_from_y(w.transpose() * z, pm, gamma);
}

Matrix geodesic_step(const Matrix& w, const Matrix& v, double t) {
  return w * matrix_exp(t * v);
}

LineSearchResult line_search(const Matrix& z, const Matrix& w, const Matrix& v,
                             const ProductModel& pm,
                             const OptimizerConfig& config) {
  return search_from_y(w.transpose() * z, v, pm, config);
}

RotationEstimate fit_ica(const Matrix& z, const ProductModel& pm,
                         const OptimizerConfig& config, const Matrix& w0) {
  const int p = static_cast<int>(z.rows());
  const auto n = z.cols();

  const Matrix cov = (z * z.transpose()) / static_cast<double>(n) -
                     (z.rowwise().mean()) * (z.rowwise().mean()).transpose();
  if ((cov - Matrix::Identity(p, p)).norm() > 0.1) {
    std::cerr << "warning: fit_ica input does not look whitened "
              << "(||cov - I||_F = " << (cov - Matrix::Identity(p, p)).norm()
              << ")\n";
  }

  RotationEstimate est;
  est.w = w0.size() == 0 ? Matrix::Identity(p, p) : w0;
  Matrix y = est.w.transpose() * z;  // rotated data, kept in sync with w

  const double tol = config.effective_grad_tol();
  est.objective_trace.push_back(objective_from_y(y, pm, config.gamma));

  for (int k = 0; k < config.max_iter; ++k) {
    const Matrix v = gradient_from_y(y, pm, config.gamma);
    const double gnorm = v.norm();
    if (gnorm < tol) {
      est.converged = true;
      break;
    }
    const LineSearchResult ls = search_from_y(y, v, pm, config);
    if (!ls.improved) {
      // Step underflowed; no ascent direction remains at representable scale.
      est.converged = true;
      break;
    }
    const Matrix r = matrix_exp(ls.t * v);
    y = r.transpose() * y;
    est.w = est.w * r;
    est.iterations = k + 1;
    est.step_trace.push_back(ls.t);
    est.grad_norm_trace.push_back(gnorm);
    est.objective_trace.push_back(objective_from_y(y, pm, config.gamma));
  }
  return est;
}

}  // namespace gica
