#include "lqsplit/matfun.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "lqsplit/errors.hpp"

namespace lqsplit::matfun {

namespace {

// Diagonal Pade(6,6) coefficients c_k = (12-k)! 6! / (12! k! (6-k)!).
constexpr std::array<double, 7> kPade6 = {
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
};

constexpr double kScaledNormBound = 0.5;

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         shape(m));
  }
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + ": matrix has non-finite entries");
  }
}

Matrix expm(const Matrix& m) {
  require_square(m, "expm");
  require_finite(m, "expm");
  const Index n = m.rows();
  if (n == 1) {
    return Matrix::Constant(1, 1, std::exp(m(0, 0)));
  }

  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > kScaledNormBound) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNormBound)));
  }
  const Matrix x = m * std::ldexp(1.0, -squarings);

  const Matrix id = Matrix::Identity(n, n);
  const Matrix x2 = x * x;
  const Matrix x4 = x2 * x2;
  const Matrix x6 = x4 * x2;
  const Matrix odd = x * (kPade6[1] * id + kPade6[3] * x2 + kPade6[5] * x4);
  const Matrix even = kPade6[0] * id + kPade6[2] * x2 + kPade6[4] * x4 + kPade6[6] * x6;

  Matrix r = (even - odd).partialPivLu().solve(even + odd);
  for (int i = 0; i < squarings; ++i) {
    r = r * r;
  }
  return r;
}

Matrix pade2(const Matrix& m, double h) {
  require_square(m, "pade2");
  require_finite(m, "pade2");
  const Index n = m.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix half = (0.5 * h) * m;
  const Matrix denom = id - half;
  if (reciprocal_condition(denom) < kSingularRcond) {
    std::ostringstream os;
    os << "pade2: I - (h/2)M is singular for h = " << h;
    throw SingularityError(os.str());
  }
  return denom.partialPivLu().solve(id + half);
}

double symmetry_defect(const Matrix& m) {
  require_square(m, "symmetry_defect");
  return (m - m.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
}

Matrix symmetrize(const Matrix& m) {
  require_square(m, "symmetrize");
  return 0.5 * (m + m.transpose());
}

double min_eigenvalue_sym(const Matrix& m, double tolerance) {
  require_square(m, "min_eigenvalue_sym");
  require_finite(m, "min_eigenvalue_sym");
  const double scale = std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
  if (symmetry_defect(m) > tolerance * scale) {
    throw InputError("min_eigenvalue_sym: matrix is not symmetric");
  }
  if (m.rows() == 1) {
    return m(0, 0);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double reciprocal_condition(const Matrix& m) {
  require_square(m, "reciprocal_condition");
  if (!m.allFinite()) {
    return 0.0;
  }
  if (m.rows() == 1) {
    return m(0, 0) == 0.0 ? 0.0 : 1.0;
  }
  return m.partialPivLu().rcond();
}

Matrix solve(const Matrix& a, const Matrix& b, std::string_view context) {
  require_square(a, context);
  if (a.rows() != b.rows()) {
    throw DimensionError(std::string(context) + ": right-hand side has " +
                         std::to_string(b.rows()) + " rows, expected " +
                         std::to_string(a.rows()));
  }
  const Eigen::PartialPivLU<Matrix> lu(a);
  if (a.rows() == 1 ? a(0, 0) == 0.0 || !std::isfinite(a(0, 0)) : lu.rcond() < kSingularRcond) {
    throw SingularityError(std::string(context) + ": matrix is singular to working precision");
  }
  return lu.solve(b);
}

Matrix inverse(const Matrix& a, std::string_view context) {
  return solve(a, Matrix::Identity(a.rows(), a.rows()), context);
}

Matrix symplectic_form(Index n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

double symplectic_defect(const Matrix& g) {
  require_square(g, "symplectic_defect");
  if (g.rows() % 2 != 0) {
    throw DimensionError("symplectic_defect: expected even dimension, got " + shape(g));
  }
  const Matrix j = symplectic_form(g.rows() / 2);
  return (g.transpose() * j * g - j).cwiseAbs().rowwise().sum().maxCoeff();
}

double hamiltonian_defect(const Matrix& k) {
  require_square(k, "hamiltonian_defect");
  if (k.rows() % 2 != 0) {
    throw DimensionError("hamiltonian_defect: expected even dimension, got " + shape(k));
  }
  return symmetry_defect(symplectic_form(k.rows() / 2) * k);
}

Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace lqsplit::matfun
