#ifndef GICA_SOURCE_MODEL_HPP
#define GICA_SOURCE_MODEL_HPP

#include <vector>

#include "gica/types.hpp"

namespace gica {

enum class SourceKind { SubGaussian, SuperGaussian };

// Working density for one latent coordinate.
//   SubGaussian:   f(s) = c1 * exp(-c s^4)
//   SuperGaussian: f(s) = c1 / cosh(c s)
// c1 is fixed at construction so that f integrates to one.
class SourceModel {
 public:
  SourceModel(SourceKind kind, double shape_c);

  SourceKind kind() const { return kind_; }
  double shape() const { return c_; }
  double normalizer() const { return c1_; }

  double density(double s) const;
  double log_density(double s) const;
  double score(double s) const;        // phi(s) = d/ds ln f(s)
  double score_deriv(double s) const;  // phi'(s)

  // Integral of f^{gamma+1} over the real line.
  double gamma_norm(double gamma) const;

  // Half-width beyond which the density tail is below 1e-12 of the peak.
  double support_halfwidth() const { return tail_; }

 private:
  SourceKind kind_;
  double c_;
  double c1_;
  double log_c1_;
  double tail_;
};

struct ProductModel {
  std::vector<SourceModel> components;

  int dim() const { return static_cast<int>(components.size()); }

  // prod_j f_j(y_j)^gamma, evaluated as exp(gamma * sum log f_j); exactly 1
  // at gamma = 0.  Underflow to 0 for extreme y is deliberate.
  double density_pow(const Vector& y, double gamma) const;

  double log_density(const Vector& y) const;
  Vector score(const Vector& y) const;
  Vector score_deriv(const Vector& y) const;
};

// p identical components of the given kind.
ProductModel make_product_model(SourceKind kind, double shape_c, int p);

}  // namespace gica

#endif  // GICA_SOURCE_MODEL_HPP
