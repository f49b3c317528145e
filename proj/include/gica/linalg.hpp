#ifndef GICA_LINALG_HPP
#define GICA_LINALG_HPP

#include "gica/types.hpp"

namespace gica {

// Matrix exponential by scaling-and-squaring over a truncated Taylor core.
// Intended for skew-symmetric arguments (geodesic steps on SO(p)); valid for
// any small square matrix.
Matrix matrix_exp(const Matrix& v);

struct SymEig {
  Vector values;   // descending
  Matrix vectors;  // columns are the matching orthonormal eigenvectors
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymEig sym_eig(const Matrix& s);

// Unique SPD inverse square root, via sym_eig.  Throws NotPositiveDefinite
// when an eigenvalue falls at or below 1e-12 times the largest.
Matrix inv_sqrt(const Matrix& s);

// Commutation matrix K_p with K_p * vec(M) = vec(M^T); vec stacks columns.
Matrix commutation_matrix(int p);

// Selection matrix Q of size p^2 x p(p-1)/2 whose columns are e_i (x) e_j
// over pairs i < j in lexicographic order (1,2),(1,3),...,(2,3),...
// vec(M) = Q * vecp(M) for strictly lower-triangular M, and P = Q^T.
Matrix selection_matrix_q(int p);

}  // namespace gica

#endif  // GICA_LINALG_HPP
