#include "gica/quadrature.hpp"

#include <cmath>

namespace gica {
namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double m, double fm, double whole,
             double eps, int depth) {
  const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  if (depth <= 0) throw QuadratureFailure("adaptive Simpson depth exhausted");
  return adapt(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  const double m = (a + b) / 2.0;
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(f, a, fa, b, fb, m, fm);
  const double eps = rel_tol * std::max(std::abs(whole), 1e-12);
  return adapt(f, a, fa, b, fb, m, fm, whole, eps, 60);
}

}  // namespace gica
