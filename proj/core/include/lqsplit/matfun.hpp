#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace lqsplit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace matfun {

/// Reciprocal condition numbers below this are treated as singular.
inline constexpr double kSingularRcond = 1e-12;

void require_square(const Matrix& m, std::string_view what);
void require_finite(const Matrix& m, std::string_view what);

/// Matrix exponential by scaling and squaring.
///
/// The argument is scaled by 2^-s so that its 1-norm is at most 1/2, the
/// scaled exponential is approximated by the degree-6 diagonal Pade
/// approximant and the result is squared s times.
Matrix expm(const Matrix& m);

/// Cayley map (I - h/2 M)^-1 (I + h/2 M), the Pade(1,1) approximant of
/// exp(hM). Throws SingularityError when I - h/2 M cannot be inverted.
Matrix pade2(const Matrix& m, double h);

/// ||M - M^T||_inf
double symmetry_defect(const Matrix& m);

/// (M + M^T) / 2
Matrix symmetrize(const Matrix& m);

/// Smallest eigenvalue of a symmetric matrix. The input is symmetrized
/// first; an asymmetry above `tolerance * max(1, ||M||_inf)` is an
/// InputError.
double min_eigenvalue_sym(const Matrix& m, double tolerance = 1e-8);

/// Estimated reciprocal 1-norm condition number from an LU factorization.
double reciprocal_condition(const Matrix& m);

/// Solves A X = B with partial pivoting. `context` is included in the
/// SingularityError raised when rcond(A) < kSingularRcond.
Matrix solve(const Matrix& a, const Matrix& b, std::string_view context);

Matrix inverse(const Matrix& a, std::string_view context);

/// Canonical skew matrix J = [[0, I], [-I, 0]] of size 2n.
Matrix symplectic_form(Index n);

/// ||G^T J G - J||_inf; zero for symplectic G.
double symplectic_defect(const Matrix& g);

/// ||(JK)^T - JK||_inf; zero for Hamiltonian K.
double hamiltonian_defect(const Matrix& k);

/// Block-diagonal matrix with the given blocks.
Matrix block_diagonal(const Matrix& a, const Matrix& b);

}  // namespace matfun
}  // namespace lqsplit
