#include "gica/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "gica/diagnostics.hpp"
#include "gica/linalg.hpp"

namespace gica {
namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t rep) {
  std::seed_seq seq{seed, stream, rep};
  return std::mt19937_64(seq);
}

std::vector<double> median_filter_channel(const std::vector<double>& img,
                                          int width, int height, int window) {
  const int half = window / 2;
  std::vector<double> out(img.size());
  std::vector<double> buf;
  buf.reserve(window * window);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      buf.clear();
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = std::clamp(r + dr, 0, height - 1);
          const int cc = std::clamp(c + dc, 0, width - 1);
          buf.push_back(img[rr * width + cc]);
        }
      }
      std::nth_element(buf.begin(), buf.begin() + buf.size() / 2, buf.end());
      out[r * width + c] = buf[buf.size() / 2];
    }
  }
  return out;
}

// Best assignment of recovered channels to sources by mean absolute
// correlation, over all permutations (p <= 4 in practice).
void best_match(const Matrix& abs_corr, std::vector<int>& matched,
                std::vector<double>& corr) {
  const int p = static_cast<int>(abs_corr.rows());
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best_total = -1.0;
  do {
    double total = 0.0;
    for (int i = 0; i < p; ++i) total += abs_corr(i, perm[i]);
    if (total > best_total) {
      best_total = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  matched.resize(p);
  corr.resize(p);
  for (int i = 0; i < p; ++i) {
    matched[i] = best_perm[i];
    corr[i] = abs_corr(i, best_perm[i]);
  }
}

double abs_correlation(const Vector& a, const Vector& b) {
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  const double denom = ac.norm() * bc.norm();
  if (denom == 0.0) return 0.0;
  return std::abs(ac.dot(bc)) / denom;
}

}  // namespace

SimulationSpec SimulationSpec::defaults() {
  SimulationSpec spec;
  spec.outlier_mean = Vector::Constant(2, 5.0);
  spec.mixing.resize(2, 2);
  spec.mixing << 1.0, 2.0, 1.0, 0.5;
  return spec;
}

SimulatedData generate_simulation(const SimulationSpec& spec, int rep) {
  auto rng = make_rng(spec.seed, /*stream=*/1, static_cast<std::uint64_t>(rep));
  const int p = spec.p;
  const int n = spec.n_clean + spec.n_outliers;

  SimulatedData out;
  out.s.resize(p, n);
  if (spec.source_kind == SimSourceKind::Uniform) {
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) out.s(j, i) = dist(rng);
  } else {
    std::student_t_distribution<double> dist(3.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) out.s(j, i) = dist(rng);
  }
  out.a = spec.mixing;
  out.x = out.a * out.s;
  out.contaminated.assign(n, false);
  std::normal_distribution<double> noise(0.0, spec.outlier_sd);
  for (int i = spec.n_clean; i < n; ++i) {
    out.contaminated[i] = true;
    for (int j = 0; j < p; ++j)
      out.x(j, i) += spec.outlier_mean(j) + noise(rng);
  }
  return out;
}

std::vector<SweepRow> run_replication_sweep(const SimulationSpec& spec,
                                            const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  const ProductModel pm = make_product_model(cfg.model_kind, cfg.shape_c, spec.p);

  for (int rep = 0; rep < spec.replications; ++rep) {
    const SimulatedData data = generate_simulation(spec, rep);
    WhiteningModel wm;
    Matrix z;
    try {
      wm = prewhiten_fixed_point(data.x, cfg.gamma_prewhiten);
      z = whiten(data.x, wm);
    } catch (const NumericalError& e) {
      std::cerr << "replication " << rep << " failed in prewhitening: "
                << e.what() << "\n";
      for (IcaMethod m : cfg.methods) {
        const bool is_gamma = m == IcaMethod::GammaIca;
        for (double g : is_gamma ? cfg.gamma_grid : std::vector<double>{0.0})
          rows.push_back({is_gamma ? "gamma_ica" : "mle_ica", g, rep, 1.0, true});
      }
      continue;
    }
    const Matrix a_tilde =
        cfg.use_true_sigma
            ? Matrix(inv_sqrt(data.a * data.a.transpose()) * data.a)
            : Matrix(wm.sigma_inv_sqrt * data.a);

    for (IcaMethod m : cfg.methods) {
      const bool is_gamma = m == IcaMethod::GammaIca;
      const std::vector<double> gammas =
          is_gamma ? cfg.gamma_grid : std::vector<double>{0.0};
      for (double g : gammas) {
        OptimizerConfig opt;
        opt.gamma = g;
        opt.max_iter = 1000;
        SweepRow row{is_gamma ? "gamma_ica" : "mle_ica", g, rep, 1.0, false};
        try {
          const RotationEstimate est = fit_ica(z, pm, opt);
          row.pi = performance_index(a_tilde, est.w);
        } catch (const NumericalError& e) {
          std::cerr << "replication " << rep << " failed: " << e.what() << "\n";
          row.failed = true;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

GrayImage median_filter(const GrayImage& img, int window) {
  std::vector<double> chan(img.pixels.begin(), img.pixels.end());
  const std::vector<double> filtered =
      median_filter_channel(chan, img.width, img.height, window);
  GrayImage out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(filtered.size());
  for (std::size_t i = 0; i < filtered.size(); ++i)
    out.pixels[i] = static_cast<std::uint8_t>(filtered[i]);
  return out;
}

ImageRunResult run_image_pipeline(const std::vector<GrayImage>& sources,
                                  const ImageSpec& spec,
                                  const ImageGammas& gammas,
                                  const ProductModel& pm) {
  const int p = static_cast<int>(sources.size());
  const int width = sources.front().width;
  const int height = sources.front().height;
  const Eigen::Index n = static_cast<Eigen::Index>(width) * height;
  for (const GrayImage& img : sources)
    if (img.width != width || img.height != height)
      throw IoError("source images have mismatched dimensions");

  Matrix s(p, n);
  for (int j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) s(j, i) = sources[j].pixels[i];

  // Mixing A = 1 1^T + C, C ~ U(-0.3, 0.3); retry on near-singular draws.
  ImageRunResult result;
  {
    std::uint64_t seed = spec.mixing_seed;
    for (int attempt = 0;; ++attempt) {
      auto rng = make_rng(seed, /*stream=*/2, attempt);
      std::uniform_real_distribution<double> dist(-0.3, 0.3);
      Matrix a = Matrix::Ones(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) += dist(rng);
      if (std::abs(a.determinant()) >= 1e-6) {
        result.mixing = a;
        break;
      }
      std::cerr << "near-singular mixing draw, retrying\n";
    }
  }

  Matrix x = result.mixing * s;
  {
    auto rng = make_rng(spec.mixing_seed, /*stream=*/3, 0);
    std::bernoulli_distribution hit(spec.contamination_fraction);
    std::normal_distribution<double> noise(spec.noise_mean, spec.noise_sd);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!hit(rng)) continue;
      if (spec.shared_noise) {
        const double e = noise(rng);
        for (int j = 0; j < p; ++j) x(j, i) += e;
      } else {
        for (int j = 0; j < p; ++j) x(j, i) += noise(rng);
      }
    }
  }

  Matrix estimation_input = x;
  if (spec.filter) {
    for (int j = 0; j < p; ++j) {
      std::vector<double> chan(n);
      for (Eigen::Index i = 0; i < n; ++i) chan[i] = x(j, i);
      const std::vector<double> filtered =
          median_filter_channel(chan, width, height, 3);
      for (Eigen::Index i = 0; i < n; ++i) estimation_input(j, i) = filtered[i];
    }
  }

  const WhiteningModel wm =
      prewhiten_fixed_point(estimation_input, gammas.prewhiten);

  // Fit on a seeded pixel subsample of the whitened estimation input.
  Matrix z_fit;
  {
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    auto rng = make_rng(spec.mixing_seed, /*stream=*/4, 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const Eigen::Index m = std::min<Eigen::Index>(spec.subsample, n);
    Matrix sub(p, m);
    for (Eigen::Index i = 0; i < m; ++i)
      sub.col(i) = estimation_input.col(idx[i]);
    z_fit = whiten(sub, wm);
  }

  OptimizerConfig opt;
  opt.gamma = gammas.ica;
  opt.max_iter = 1000;
  const RotationEstimate est = fit_ica(z_fit, pm, opt);

  // Unmix the original mixed pixels, filtered or not.
  const Matrix recovered = est.w.transpose() * whiten(x, wm);

  Matrix abs_corr(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      abs_corr(i, j) =
          abs_correlation(recovered.row(i).transpose(), s.row(j).transpose());
  best_match(abs_corr, result.matched_source, result.correlation);
  result.mean_correlation =
      std::accumulate(result.correlation.begin(), result.correlation.end(), 0.0) /
      p;

  // Affine rescale with 1st/99th percentile clipping.
  result.recovered.resize(p);
  for (int i = 0; i < p; ++i) {
    std::vector<double> vals(n);
    for (Eigen::Index k = 0; k < n; ++k) vals[k] = recovered(i, k);
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted[static_cast<std::size_t>(0.01 * (n - 1))];
    const double hi = sorted[static_cast<std::size_t>(0.99 * (n - 1))];
    const double span = std::max(hi - lo, 1e-12);
    GrayImage& img = result.recovered[i];
    img.width = width;
    img.height = height;
    img.pixels.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double v = std::clamp((vals[k] - lo) / span, 0.0, 1.0);
      img.pixels[k] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return result;
}

}  // namespace gica
