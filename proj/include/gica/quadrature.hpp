#ifndef GICA_QUADRATURE_HPP
#define GICA_QUADRATURE_HPP

#include <functional>

#include "gica/types.hpp"

namespace gica {

// Adaptive Simpson quadrature on [a, b] with relative tolerance rel_tol.
// Throws QuadratureFailure when the recursion depth cap is hit before the
// tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

}  // namespace gica

#endif  // GICA_QUADRATURE_HPP
