#ifndef GICA_DIAGNOSTICS_HPP
#define GICA_DIAGNOSTICS_HPP

#include <vector>

#include "gica/source_model.hpp"
#include "gica/types.hpp"

namespace gica {

struct PsiEstimate {
  double gamma = 0.0;
  Matrix psi;     // p(p-1)/2 square, symmetric
  double lambda_max = 0.0;
  Matrix u;       // u(j,k) = mean of f^g(s) phi_j'(s_j) s_k^2
  Vector d;       // d(j)   = mean of f^g(s) phi_j(s_j) s_j
  Matrix psi2;    // p^2 x p^2 Gram term, before projection
};

struct MeanWithError {
  double mean = 0.0;
  double std_error = 0.0;
};

struct ConsistencyReport {
  std::vector<std::pair<double, double>> grid;  // (gamma, lambda_max)
  // condition (A): per coordinate, per grid gamma
  std::vector<std::vector<MeanWithError>> condition_a;
  // condition (B): per pair (j<k, lexicographic), per grid gamma
  std::vector<std::vector<MeanWithError>> condition_b;
};

// Empirical Psi_gamma of the recovery-consistency criterion evaluated on
// recovered (or true) sources, one sample per column.
PsiEstimate estimate_psi(const Matrix& s_hat, const ProductModel& pm,
                         double gamma);

ConsistencyReport consistency_scan(const Matrix& s_hat, const ProductModel& pm,
                                   const std::vector<double>& grid);

// pi index of the gain matrix A_tilde * W_hat^T; 0 iff a scaled permutation.
double performance_index(const Matrix& a_tilde, const Matrix& w_hat);

}  // namespace gica

#endif  // GICA_DIAGNOSTICS_HPP
