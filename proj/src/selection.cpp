#include "gica/selection.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include "gica/prewhiten.hpp"

namespace gica {
namespace {

Matrix gather_columns(const Matrix& data,
                      const std::vector<Eigen::Index>& idx) {
  Matrix out(data.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(i) = data.col(idx[i]);
  return out;
}

Matrix drop_columns(const Matrix& data, const std::vector<Eigen::Index>& idx) {
  std::vector<bool> held(data.cols(), false);
  for (Eigen::Index i : idx) held[i] = true;
  Matrix out(data.rows(), data.cols() - static_cast<Eigen::Index>(idx.size()));
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < data.cols(); ++i)
    if (!held[i]) out.col(c++) = data.col(i);
  return out;
}

double pick_argmin(const std::vector<CvScore>& scores, int k_folds) {
  double best = std::numeric_limits<double>::infinity();
  double chosen = scores.front().gamma;
  for (const CvScore& s : scores) {
    if (s.n_failed_folds > k_folds / 2) continue;  // disqualified
    if (s.score < best) {  // ties resolved toward the smaller gamma by scan order
      best = s.score;
      chosen = s.gamma;
    }
  }
  return chosen;
}

}  // namespace

double gamma_cross_entropy_gauss(const Matrix& sample, const Vector& mu,
                                 const Matrix& sigma, double gamma0) {
  const int p = static_cast<int>(sample.rows());
  const auto m = sample.cols();
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("gamma_cross_entropy_gauss: sigma not SPD");
  const double log_det =
      2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();

  // ||xi||_{g0+1}^{g0+1} = (g0+1)^{-p/2} (2pi)^{-p g0/2} det(Sigma)^{-g0/2}
  const double log_norm_pow =
      (-0.5 * p * std::log(gamma0 + 1.0) -
       0.5 * p * gamma0 * std::log(2.0 * M_PI) - 0.5 * gamma0 * log_det) /
      (gamma0 + 1.0);

  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector r = sample.col(i) - mu;
    const double log_xi = -0.5 * p * std::log(2.0 * M_PI) - 0.5 * log_det -
                          0.5 * r.dot(llt.solve(r));
    acc += std::exp(gamma0 * (log_xi - log_norm_pow));
  }
  return -acc / static_cast<double>(m);
}

double gamma_cross_entropy_ica(const Matrix& sample, const Matrix& w,
                               const ProductModel& pm, double gamma0) {
  const auto m = sample.cols();
  double log_norm_pow = 0.0;
  for (const SourceModel& c : pm.components)
    log_norm_pow += std::log(c.gamma_norm(gamma0));
  log_norm_pow /= (gamma0 + 1.0);

  const Matrix y = w.transpose() * sample;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    acc += std::exp(gamma0 * (pm.log_density(y.col(i)) - log_norm_pow));
  return -acc / static_cast<double>(m);
}

std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k_folds,
                                                  std::uint64_t seed) {
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::vector<Eigen::Index>> folds(k_folds);
  for (Eigen::Index i = 0; i < n; ++i)
    folds[i % k_folds].push_back(idx[i]);
  return folds;
}

CvResult select_gamma_prewhiten(const Matrix& data, const CvConfig& cfg) {
  const auto folds = make_folds(data.cols(), cfg.k_folds, cfg.seed);
  CvResult result;
  for (double gamma : cfg.grid) {
    CvScore entry{gamma, 0.0, 0};
    int ok = 0;
    for (const auto& fold : folds) {
      const Matrix train = drop_columns(data, fold);
      const Matrix test = gather_columns(data, fold);
      try {
        const WhiteningModel m = prewhiten_fixed_point(train, gamma);
        entry.score +=
            gamma_cross_entropy_gauss(test, m.mu, m.sigma, cfg.gamma0);
        ++ok;
      } catch (const DegenerateScatter& e) {
        std::cerr << "warning: fold skipped at gamma=" << gamma << ": "
                  << e.what() << "\n";
        ++entry.n_failed_folds;
      }
    }
    entry.score = ok > 0 ? entry.score / ok
                         : std::numeric_limits<double>::infinity();
    result.scores.push_back(entry);
  }
  result.chosen_gamma = pick_argmin(result.scores, cfg.k_folds);
  return result;
}

CvResult select_gamma_ica(const Matrix& z, const ProductModel& pm,
                          const OptimizerConfig& opt, const CvConfig& cfg) {
  const auto folds = make_folds(z.cols(), cfg.k_folds, cfg.seed);
  std::vector<double> grid = cfg.grid;
  std::sort(grid.begin(), grid.end());

  const int p = static_cast<int>(z.rows());
  std::vector<Matrix> warm(folds.size(), Matrix::Identity(p, p));

  CvResult result;
  for (double gamma : grid) {
    CvScore entry{gamma, 0.0, 0};
    for (std::size_t k = 0; k < folds.size(); ++k) {
      const Matrix train = drop_columns(z, folds[k]);
      const Matrix test = gather_columns(z, folds[k]);
      OptimizerConfig fold_opt = opt;
      fold_opt.gamma = gamma;
      const RotationEstimate est = fit_ica(train, pm, fold_opt, warm[k]);
      warm[k] = est.w;
      entry.score += gamma_cross_entropy_ica(test, est.w, pm, cfg.gamma0);
    }
    entry.score /= static_cast<double>(folds.size());
    result.scores.push_back(entry);
  }
  result.chosen_gamma = pick_argmin(result.scores, cfg.k_folds);
  return result;
}

}  // namespace gica
