#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gica/diagnostics.hpp"
#include "gica/linalg.hpp"

using gica::Matrix;
using gica::ProductModel;
using gica::SourceKind;
using gica::Vector;

namespace {

Matrix uniform_sources(int p, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Matrix s(p, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) s(j, i) = u(rng);
  return s;
}

Matrix t3_sources(int p, int n, std::mt19937_64& rng) {
  std::student_t_distribution<double> t(3.0);
  Matrix s(p, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) s(j, i) = t(rng);
  return s;
}

// Brute-force oracle: assemble Psi_gamma from the full p^2 x p^2 pieces with
// no diagonality shortcut, everything recomputed from scratch.
Matrix brute_force_psi(const Matrix& s_hat, const ProductModel& pm,
                       double gamma) {
  const int p = static_cast<int>(s_hat.rows());
  const auto n = s_hat.cols();
  Matrix u = Matrix::Zero(p, p);
  Vector d = Vector::Zero(p);
  Matrix psi2 = Matrix::Zero(p * p, p * p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector s = s_hat.col(i);
    double f_pow = 1.0;
    for (int j = 0; j < p; ++j)
      f_pow *= std::pow(pm.components[j].density(s(j)), gamma);
    const Vector phi = pm.score(s);
    const Vector dphi = pm.score_deriv(s);
    for (int j = 0; j < p; ++j) {
      for (int k = 0; k < p; ++k) u(j, k) += f_pow * dphi(j) * s(k) * s(k);
      d(j) += f_pow * phi(j) * s(j);
    }
    // kron(phi phi^T, s s^T)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c)
          for (int e = 0; e < p; ++e)
            psi2(a * p + b, c * p + e) += f_pow * phi(a) * phi(c) * s(b) * s(e);
  }
  u /= static_cast<double>(n);
  d /= static_cast<double>(n);
  psi2 /= static_cast<double>(n);

  // (A (x) B)(a p + b, c p + e) = A(a, c) B(b, e), spelled out index by index.
  Matrix psi1 = Matrix::Zero(p * p, p * p);
  for (int j = 0; j < p; ++j) {
    Matrix uj = Matrix::Zero(p, p);
    for (int k = 0; k < p; ++k) uj(k, k) = u(j, k);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c)
          for (int e = 0; e < p; ++e)
            psi1(a * p + b, c * p + e) +=
                (a == j && c == j ? 1.0 : 0.0) * uj(b, e);
  }
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < p; ++c)
        for (int e = 0; e < p; ++e)
          psi1(a * p + b, c * p + e) -=
              (a == c ? d(a) : 0.0) * (b == e ? 1.0 : 0.0);

  const Matrix q = gica::selection_matrix_q(p);
  const Matrix proj =
      Matrix::Identity(p * p, p * p) - gica::commutation_matrix(p);
  Matrix psi =
      q.transpose() * proj * (gamma * psi1 + gamma * gamma * psi2) * proj * q;
  return (psi + psi.transpose()) / 2.0;
}

}  // namespace

TEST_CASE("projected Psi_(1) is diagonal with the pairwise entries") {
  std::mt19937_64 rng(41);
  for (int p : {2, 3, 4}) {
    const ProductModel pm =
        gica::make_product_model(SourceKind::SubGaussian, 0.1, p);
    const Matrix s = uniform_sources(p, 400, rng);
    const double gamma = 0.3;
    const gica::PsiEstimate est = gica::estimate_psi(s, pm, gamma);

    Matrix psi1 = Matrix::Zero(p * p, p * p);
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < p; ++k) {
        psi1(j * p + k, j * p + k) += est.u(j, k) - est.d(j);
      }
    const Matrix q = gica::selection_matrix_q(p);
    const Matrix proj =
        Matrix::Identity(p * p, p * p) - gica::commutation_matrix(p);
    const Matrix reduced = q.transpose() * proj * psi1 * proj * q;

    int pair = 0;
    for (int j = 0; j < p; ++j)
      for (int k = j + 1; k < p; ++k, ++pair) {
        const double expected =
            (est.u(j, k) - est.d(j)) + (est.u(k, j) - est.d(k));
        CHECK(reduced(pair, pair) == doctest::Approx(expected).epsilon(1e-10));
      }
    // everything off the diagonal vanishes
    Matrix off = reduced;
    off.diagonal().setZero();
    CHECK(off.norm() < 1e-10);
  }
}

TEST_CASE("Psi_(2) is positive semidefinite") {
  std::mt19937_64 rng(42);
  const ProductModel pm =
      gica::make_product_model(SourceKind::SuperGaussian, 1.5, 3);
  const Matrix s = t3_sources(3, 500, rng);
  const gica::PsiEstimate est = gica::estimate_psi(s, pm, 0.5);
  const gica::SymEig eig = gica::sym_eig(est.psi2);
  CHECK(eig.values.minCoeff() > -1e-10);
}

TEST_CASE("estimate_psi matches the brute-force Kronecker assembly") {
  std::mt19937_64 rng(43);
  for (int p : {2, 3}) {
    const ProductModel pm =
        gica::make_product_model(SourceKind::SubGaussian, 0.1, p);
    const Matrix s = uniform_sources(p, 300, rng);
    const gica::PsiEstimate est = gica::estimate_psi(s, pm, 0.3);
    const Matrix oracle = brute_force_psi(s, pm, 0.3);
    CHECK((est.psi - oracle).norm() < 1e-10);
  }
}

TEST_CASE("lambda_max is negative for uniform sources with sub-Gaussian model") {
  std::mt19937_64 rng(44);
  const ProductModel pm =
      gica::make_product_model(SourceKind::SubGaussian, 0.1, 2);
  const Matrix s = uniform_sources(2, 100000, rng);
  const gica::PsiEstimate est = gica::estimate_psi(s, pm, 0.3);
  CHECK(est.lambda_max < 0.0);
}

TEST_CASE("estimate_psi is invariant to sample order") {
  std::mt19937_64 rng(45);
  const ProductModel pm =
      gica::make_product_model(SourceKind::SubGaussian, 0.1, 2);
  const Matrix s = uniform_sources(2, 200, rng);
  Matrix reversed = s.rowwise().reverse();
  const gica::PsiEstimate a = gica::estimate_psi(s, pm, 0.4);
  const gica::PsiEstimate b = gica::estimate_psi(reversed, pm, 0.4);
  CHECK((a.psi - b.psi).norm() < 1e-12);
}

TEST_CASE("small-gamma lambda_max tracks the condition-(B) diagonal") {
  std::mt19937_64 rng(46);
  const ProductModel pm =
      gica::make_product_model(SourceKind::SubGaussian, 0.1, 2);
  const Matrix s = uniform_sources(2, 20000, rng);
  const double gamma = 1e-4;
  const gica::PsiEstimate est = gica::estimate_psi(s, pm, gamma);
  const double pair_value =
      (est.u(0, 1) - est.d(0)) + (est.u(1, 0) - est.d(1));
  const Matrix q = gica::selection_matrix_q(2);
  const Matrix proj = Matrix::Identity(4, 4) - gica::commutation_matrix(2);
  const Matrix psi2_reduced = q.transpose() * proj * est.psi2 * proj * q;
  const double psi2_bound = gica::sym_eig(psi2_reduced).values(0);
  CHECK(std::abs(est.lambda_max - gamma * pair_value) <=
        gamma * gamma * psi2_bound + 1e-14);
}

TEST_CASE("consistency scan reports near-zero condition (A) and the MLE limit") {
  std::mt19937_64 rng(47);
  const ProductModel pm =
      gica::make_product_model(SourceKind::SubGaussian, 0.1, 2);
  const Matrix s = uniform_sources(2, 100000, rng);
  const gica::ConsistencyReport report =
      gica::consistency_scan(s, pm, {1e-6, 0.3});

  for (const auto& mwe : report.condition_a[1])
    CHECK(std::abs(mwe.mean) < 3.0 * mwe.std_error);

  // At gamma -> 0 the pair statistic approaches
  // E[phi_1 S_1 - phi_1' S_2^2 + phi_2 S_2 - phi_2' S_1^2]; compute that
  // reference directly on the same sample.
  double ref = 0.0;
  for (Eigen::Index i = 0; i < s.cols(); ++i) {
    const double s1 = s(0, i), s2 = s(1, i);
    ref += pm.components[0].score(s1) * s1 -
           pm.components[0].score_deriv(s1) * s2 * s2 +
           pm.components[1].score(s2) * s2 -
           pm.components[1].score_deriv(s2) * s1 * s1;
  }
  ref /= static_cast<double>(s.cols());
  const auto& b = report.condition_b[0][0];
  CHECK(b.mean == doctest::Approx(ref).epsilon(1e-3));
  CHECK(b.mean > 0.0);  // uniform sources are recoverable under this model
}

TEST_CASE("performance index on permutations and the flat matrix") {
  Matrix identity = Matrix::Identity(2, 2);
  CHECK(gica::performance_index(identity, identity) == doctest::Approx(0.0));

  Matrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK(gica::performance_index(swap, identity) == doctest::Approx(0.0));
  Matrix signed_swap(2, 2);
  signed_swap << 0.0, -1.0, 1.0, 0.0;
  CHECK(gica::performance_index(signed_swap, identity) == doctest::Approx(0.0));

  Matrix flat = Matrix::Ones(2, 2);
  CHECK(gica::performance_index(flat, identity) == doctest::Approx(1.0));
}

TEST_CASE("performance index invariances and range") {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(3, 3), w(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = u(rng) + (i == j ? 2.0 : 0.0);
      w(i, j) = u(rng);
    }
  const double base = gica::performance_index(a, w);
  CHECK(base <= 1.0);
  CHECK(base >= 0.0);

  Matrix perm = Matrix::Zero(3, 3);
  perm(0, 1) = perm(1, 2) = perm(2, 0) = 1.0;
  Matrix signs = Matrix::Identity(3, 3);
  signs(1, 1) = -1.0;
  // relabeling the recovered sources (s_hat = W^T z, so permuting and
  // sign-flipping the columns of W) leaves the index unchanged
  CHECK(gica::performance_index(a, Matrix(w * signs * perm)) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("performance index rejects an all-zero row") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;  // second row of the product will be zero
  CHECK_THROWS_AS(gica::performance_index(a, Matrix::Identity(2, 2)),
                  gica::DegenerateRow);
}
