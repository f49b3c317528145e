#ifndef GICA_HARNESS_HPP
#define GICA_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gica/io.hpp"
#include "gica/optimizer.hpp"
#include "gica/prewhiten.hpp"
#include "gica/source_model.hpp"
#include "gica/types.hpp"

namespace gica {

enum class SimSourceKind { Uniform, StudentT3 };

struct SimulationSpec {
  SimSourceKind source_kind = SimSourceKind::Uniform;
  int p = 2;
  int n_clean = 150;
  int n_outliers = 0;
  Vector outlier_mean;           // default (5, 5)
  double outlier_sd = 5.0;
  Matrix mixing;                 // default [[1,2],[1,0.5]]
  int replications = 100;
  std::uint64_t seed = 0;

  static SimulationSpec defaults();
};

struct SimulatedData {
  Matrix x;  // mixed observations
  Matrix s;  // true sources
  Matrix a;  // mixing matrix used
  std::vector<bool> contaminated;
};

// Sources are drawn with their natural scale (Uniform(-3,3) and t3 both have
// variance 3); whitening restores the unit-covariance convention.
SimulatedData generate_simulation(const SimulationSpec& spec, int rep);

enum class IcaMethod { GammaIca, MleIca };

struct SweepRow {
  std::string method;
  double gamma = 0.0;  // ICA-stage gamma (0 for MLE)
  int replication = 0;
  double pi = 0.0;
  bool failed = false;
};

struct SweepConfig {
  double gamma_prewhiten = 0.2;
  std::vector<double> gamma_grid;  // gammas for the gamma-ICA method
  std::vector<IcaMethod> methods{IcaMethod::GammaIca, IcaMethod::MleIca};
  SourceKind model_kind = SourceKind::SubGaussian;
  double shape_c = 0.1;
  // Score against (A A^T)^{-1/2} A instead of the estimated whitening.
  bool use_true_sigma = false;
};

std::vector<SweepRow> run_replication_sweep(const SimulationSpec& spec,
                                            const SweepConfig& cfg);

// window x window median filter with replicated borders.
GrayImage median_filter(const GrayImage& img, int window = 3);

struct ImageSpec {
  std::vector<std::string> source_paths;  // 4 grayscale PGM files
  std::uint64_t mixing_seed = 0;
  double contamination_fraction = 0.3;
  double noise_mean = 20.0;
  double noise_sd = 50.0;
  int subsample = 1000;
  bool filter = false;        // median pre-filter on the estimation input
  bool shared_noise = false;  // one noise draw shared across channels
};

struct ImageRunResult {
  std::vector<GrayImage> recovered;
  Matrix mixing;                        // the A actually used
  std::vector<int> matched_source;      // best-match permutation, per channel
  std::vector<double> correlation;      // |corr| with the matched true source
  double mean_correlation = 0.0;
};

struct ImageGammas {
  double prewhiten = 0.2;
  double ica = 0.15;
};

// Mix, contaminate, (optionally) filter, prewhiten, fit on a pixel
// subsample, and unmix the original mixed pixels.  method gamma = 0 runs the
// MLE baseline on the same whitened input.
ImageRunResult run_image_pipeline(const std::vector<GrayImage>& sources,
                                  const ImageSpec& spec,
                                  const ImageGammas& gammas,
                                  const ProductModel& pm);

}  // namespace gica

#endif  // GICA_HARNESS_HPP
