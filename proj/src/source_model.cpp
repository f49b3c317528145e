#include "gica/source_model.hpp"

#include <cassert>
#include <cmath>

#include "gica/quadrature.hpp"

namespace gica {

SourceModel::SourceModel(SourceKind kind, double shape_c)
    : kind_(kind), c_(shape_c) {
  assert(shape_c > 0.0);
  // Unnormalized tail: exp(-c t^4) or sech(c t) both drop below 1e-12 of the
  // peak well inside these half-widths for the shapes in use.
  if (kind_ == SourceKind::SubGaussian) {
    tail_ = std::pow(28.0 / c_, 0.25) + 1.0;
  } else {
    tail_ = 29.0 / c_ + 1.0;
  }
  const double mass = integrate(
      [this](double s) {
        return kind_ == SourceKind::SubGaussian
                   ? std::exp(-c_ * s * s * s * s)
                   : 1.0 / std::cosh(c_ * s);
      },
      -tail_, tail_, 1e-12);
  c1_ = 1.0 / mass;
  log_c1_ = std::log(c1_);
}

double SourceModel::log_density(double s) const {
  if (kind_ == SourceKind::SubGaussian) return log_c1_ - c_ * s * s * s * s;
  // log sech(cs) computed from |cs| to avoid cosh overflow.
  const double a = std::abs(c_ * s);
  return log_c1_ - a - std::log1p(std::exp(-2.0 * a)) + std::log(2.0);
}

double SourceModel::density(double s) const { return std::exp(log_density(s)); }

double SourceModel::score(double s) const {
  if (kind_ == SourceKind::SubGaussian) return -4.0 * c_ * s * s * s;
  return -c_ * std::tanh(c_ * s);
}

double SourceModel::score_deriv(double s) const {
  if (kind_ == SourceKind::SubGaussian) return -12.0 * c_ * s * s;
  const double ch = std::cosh(c_ * s);
  return -c_ * c_ / (ch * ch);
}

double SourceModel::gamma_norm(double gamma) const {
  assert(gamma > 0.0);
  return integrate(
      [this, gamma](double s) {
        return std::exp((gamma + 1.0) * log_density(s));
      },
      -tail_, tail_, 1e-10);
}

double ProductModel::density_pow(const Vector& y, double gamma) const {
  if (gamma == 0.0) return 1.0;
  return std::exp(gamma * log_density(y));
}

double ProductModel::log_density(const Vector& y) const {
  double acc = 0.0;
  for (int j = 0; j < dim(); ++j) acc += components[j].log_density(y(j));
  return acc;
}

Vector ProductModel::score(const Vector& y) const {
  Vector phi(dim());
  for (int j = 0; j < dim(); ++j) phi(j) = components[j].score(y(j));
  return phi;
}

Vector ProductModel::score_deriv(const Vector& y) const {
  Vector dphi(dim());
  for (int j = 0; j < dim(); ++j) dphi(j) = components[j].score_deriv(y(j));
  return dphi;
}

ProductModel make_product_model(SourceKind kind, double shape_c, int p) {
  ProductModel pm;
  pm.components.reserve(p);
  const SourceModel m(kind, shape_c);
  for (int j = 0; j < p; ++j) pm.components.push_back(m);
  return pm;
}

}  // namespace gica
