#include "gica/diagnostics.hpp"

#include <cmath>

#include "gica/linalg.hpp"

namespace gica {
namespace {

MeanWithError mean_with_error(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

PsiEstimate estimate_psi(const Matrix& s_hat, const ProductModel& pm,
                         double gamma) {
  const int p = static_cast<int>(s_hat.rows());
  const auto n = s_hat.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  PsiEstimate out;
  out.gamma = gamma;
  out.u = Matrix::Zero(p, p);
  out.d = Vector::Zero(p);
  out.psi2 = Matrix::Zero(p * p, p * p);

  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector s = s_hat.col(i);
    const double w = std::exp(gamma * pm.log_density(s));
    const Vector phi = pm.score(s);
    const Vector dphi = pm.score_deriv(s);
    for (int j = 0; j < p; ++j) {
      for (int k = 0; k < p; ++k) out.u(j, k) += w * dphi(j) * s(k) * s(k);
      out.d(j) += w * phi(j) * s(j);
    }
    // phi phi^T (x) s s^T = (kron(phi, s)) (kron(phi, s))^T
    Vector v(p * p);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) v(a * p + b) = phi(a) * s(b);
    out.psi2.noalias() += w * (v * v.transpose());
  }
  out.u *= inv_n;
  out.d *= inv_n;
  out.psi2 *= inv_n;

  // Psi_(1) = sum_j (e_j e_j^T (x) U_j) - (D (x) I_p), U_j = diag(u_j.)
  Matrix psi1 = Matrix::Zero(p * p, p * p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) {
      psi1(j * p + k, j * p + k) += out.u(j, k);
      psi1(j * p + k, j * p + k) -= out.d(j);
    }

  const Matrix q = selection_matrix_q(p);
  const Matrix proj = Matrix::Identity(p * p, p * p) - commutation_matrix(p);
  Matrix psi = q.transpose() * proj *
               (gamma * psi1 + gamma * gamma * out.psi2) * proj * q;
  out.psi = (psi + psi.transpose()) / 2.0;
  out.lambda_max = sym_eig(out.psi).values(0);
  return out;
}

ConsistencyReport consistency_scan(const Matrix& s_hat, const ProductModel& pm,
                                   const std::vector<double>& grid) {
  const int p = static_cast<int>(s_hat.rows());
  const auto n = s_hat.cols();

  ConsistencyReport report;
  for (double gamma : grid) {
    report.grid.emplace_back(gamma, estimate_psi(s_hat, pm, gamma).lambda_max);

    std::vector<MeanWithError> cond_a;
    for (int j = 0; j < p; ++j) {
      std::vector<double> vals(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sj = s_hat(j, i);
        vals[i] = std::exp(gamma * pm.components[j].log_density(sj)) * sj;
      }
      cond_a.push_back(mean_with_error(vals));
    }
    report.condition_a.push_back(std::move(cond_a));

    std::vector<MeanWithError> cond_b;
    for (int j = 0; j < p; ++j) {
      for (int k = j + 1; k < p; ++k) {
        std::vector<double> vals(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Vector s = s_hat.col(i);
          const double w = std::exp(gamma * pm.log_density(s));
          const double term_jk = pm.components[j].score(s(j)) * s(j) -
                                 pm.components[j].score_deriv(s(j)) * s(k) * s(k);
          const double term_kj = pm.components[k].score(s(k)) * s(k) -
                                 pm.components[k].score_deriv(s(k)) * s(j) * s(j);
          vals[i] = w * (term_jk + term_kj);
        }
        cond_b.push_back(mean_with_error(vals));
      }
    }
    report.condition_b.push_back(std::move(cond_b));
  }
  return report;
}

double performance_index(const Matrix& a_tilde, const Matrix& w_hat) {
  const int p = static_cast<int>(a_tilde.rows());
  // Gain of the recovered sources s_hat = W^T z = (W^T A~) s over the true
  // ones; a generalized permutation exactly at separation.
  const Matrix pi_mat = (w_hat.transpose() * a_tilde).cwiseAbs();
  double acc = 0.0;
  for (int i = 0; i < p; ++i) {
    const double row_max = pi_mat.row(i).maxCoeff();
    const double col_max = pi_mat.col(i).maxCoeff();
    if (row_max <= 0.0 || col_max <= 0.0)
      throw DegenerateRow("performance_index: zero row or column in gain matrix");
    acc += pi_mat.row(i).sum() / row_max - 1.0;
    acc += pi_mat.col(i).sum() / col_max - 1.0;
  }
  return acc / (2.0 * p * (p - 1));
}

}  // namespace gica
