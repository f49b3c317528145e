#ifndef GICA_TYPES_HPP
#define GICA_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numerical failures carry a category so the CLI can map them to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class NotPositiveDefinite : public NumericalError {
 public:
  explicit NotPositiveDefinite(const std::string& what) : NumericalError(what) {}
};

class ConvergenceFailure : public NumericalError {
 public:
  explicit ConvergenceFailure(const std::string& what) : NumericalError(what) {}
};

class QuadratureFailure : public NumericalError {
 public:
  explicit QuadratureFailure(const std::string& what) : NumericalError(what) {}
};

class DegenerateScatter : public NumericalError {
 public:
  explicit DegenerateScatter(const std::string& what) : NumericalError(what) {}
};

class DegenerateRow : public NumericalError {
 public:
  explicit DegenerateRow(const std::string& what) : NumericalError(what) {}
};

}  // namespace gica

#endif  // GICA_TYPES_HPP
