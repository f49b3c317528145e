#ifndef GICA_OPTIMIZER_HPP
#define GICA_OPTIMIZER_HPP

#include <vector>

#include "gica/source_model.hpp"
#include "gica/types.hpp"

namespace gica {

enum class StepRule { FirstImproved, Armijo };

struct OptimizerConfig {
  double gamma = 0.0;      // 0 selects the MLE objective
  double alpha = 1.0;      // initial step
  double rho = 0.5;        // backtracking factor
  double eta = 1e-4;       // Armijo constant
  StepRule step_rule = StepRule::FirstImproved;
  int max_iter = 2000;
  double grad_tol = -1.0;  // < 0: use 1e-6 * max(gamma, 1)

  double effective_grad_tol() const {
    if (grad_tol >= 0.0) return grad_tol;
    return gamma > 0.0 ? 1e-6 * gamma : 1e-6;
  }
};

struct RotationEstimate {
  Matrix w;  // orthogonal with det = 1; columns w_j, recovered Y = W^T Z
  std::vector<double> objective_trace;
  std::vector<double> step_trace;
  std::vector<double> grad_norm_trace;
  int iterations = 0;
  bool converged = false;
};

// Objective over the whitened data: for gamma > 0 the average of
// prod_j f_j^gamma(w_j^T z_i); for gamma = 0 the average log-likelihood.
double objective(const Matrix& z, const Matrix& w, const ProductModel& pm,
                 double gamma);

// Skew-symmetric projected gradient of W |-> objective(Z, W_k W) at the
// identity, expressed through Y = W^T Z.
Matrix projected_gradient(const Matrix& z, const Matrix& w,
                          const ProductModel& pm, double gamma);

// W * exp(t V); stays on SO(p) for skew V.
Matrix geodesic_step(const Matrix& w, const Matrix& v, double t);

struct LineSearchResult {
  double t = 0.0;
  int backtracks = 0;
  bool improved = false;
};

LineSearchResult line_search(const Matrix& z, const Matrix& w, const Matrix& v,
                             const ProductModel& pm,
                             const OptimizerConfig& config);

// Geodesic gradient ascent from w0 (identity by default).  Rotates the data
// in place and accumulates W alongside; the two representations are kept
// consistent to roundoff.
RotationEstimate fit_ica(const Matrix& z, const ProductModel& pm,
                         const OptimizerConfig& config,
                         const Matrix& w0 = Matrix());

}  // namespace gica

#endif  // GICA_OPTIMIZER_HPP
