#include "gica/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gica {

Matrix matrix_exp(const Matrix& v) {
  const int p = static_cast<int>(v.rows());
  const double norm = v.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Matrix a = v / std::ldexp(1.0, squarings);

  // Taylor sum; terms of a matrix with inf-norm <= 0.5 decay fast enough
  // that 30 terms put the truncation error far below 1e-16.
  Matrix result = Matrix::Identity(p, p);
  Matrix term = Matrix::Identity(p, p);
  for (int k = 1; k <= 30; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

SymEig sym_eig(const Matrix& s) {
  const int p = static_cast<int>(s.rows());
  Matrix a = (s + s.transpose()) / 2.0;
  Matrix v = Matrix::Identity(p, p);

  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  const int max_sweeps = 10 * p * p;
  bool done = (p == 1);
  for (int sweep = 0; sweep < max_sweeps && !done; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) < 1e-15 * scale * p) {
      done = true;
      break;
    }
    for (int i = 0; i < p - 1; ++i) {
      for (int j = i + 1; j < p; ++j) {
        if (std::abs(a(i, j)) < 1e-18 * scale) continue;
        const double theta = (a(j, j) - a(i, i)) / (2.0 * a(i, j));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        // Apply the rotation on both sides.
        for (int k = 0; k < p; ++k) {
          const double aik = a(i, k), ajk = a(j, k);
          a(i, k) = c * aik - sn * ajk;
          a(j, k) = sn * aik + c * ajk;
        }
        for (int k = 0; k < p; ++k) {
          const double aki = a(k, i), akj = a(k, j);
          a(k, i) = c * aki - sn * akj;
          a(k, j) = sn * aki + c * akj;
        }
        for (int k = 0; k < p; ++k) {
          const double vki = v(k, i), vkj = v(k, j);
          v(k, i) = c * vki - sn * vkj;
          v(k, j) = sn * vki + c * vkj;
        }
      }
    }
  }
  if (!done) throw ConvergenceFailure("sym_eig: Jacobi sweeps exhausted");

  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a(x, x) > a(y, y); });
  SymEig out;
  out.values.resize(p);
  out.vectors.resize(p, p);
  for (int k = 0; k < p; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

Matrix inv_sqrt(const Matrix& s) {
  const SymEig eig = sym_eig(s);
  const double lambda_max = eig.values(0);
  const double floor = 1e-12 * lambda_max;
  const int p = static_cast<int>(s.rows());
  Vector d(p);
  for (int i = 0; i < p; ++i) {
    if (eig.values(i) <= floor)
      throw NotPositiveDefinite("inv_sqrt: eigenvalue " +
                                std::to_string(eig.values(i)) +
                                " below positive-definiteness floor");
    d(i) = 1.0 / std::sqrt(eig.values(i));
  }
  return eig.vectors * d.asDiagonal() * eig.vectors.transpose();
}

Matrix commutation_matrix(int p) {
  Matrix k = Matrix::Zero(p * p, p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) k(i + j * p, j + i * p) = 1.0;
  return k;
}

Matrix selection_matrix_q(int p) {
  const int cols = p * (p - 1) / 2;
  Matrix q = Matrix::Zero(p * p, cols);
  int col = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      // e_i (x) e_j has its single 1 at index i*p + j.
      q(i * p + j, col) = 1.0;
      ++col;
    }
  }
  return q;
}

}  // namespace gica
