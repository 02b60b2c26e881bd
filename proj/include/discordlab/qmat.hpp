// Dense complex-matrix kernel for small quantum systems (dim <= 64):
// tensor products, partial traces, Hermitian eigendecomposition with a
// deterministic ordering/phase convention, and exact matrix functions.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace discordlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr int max_dim = 64;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Subsystem { a, b };

inline const char* to_string(Subsystem s) { return s == Subsystem::a ? "A" : "B"; }

inline void check_square(const Matrix& m, const std::string& who) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw DimensionError(who + ": expected a square matrix with dim >= 1, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void check_finite(const Matrix& m, const std::string& who) {
  if (!m.allFinite()) {
    throw ValidationError(who + ": matrix contains NaN or Inf entries");
  }
}

inline double hermiticity_error(const Matrix& m) {
  const double scale = std::max(m.norm(), 1e-300);
  return (m - m.adjoint()).norm() / scale;
}

inline bool is_hermitian(const Matrix& m, double rtol = 1e-8) {
  return m.rows() == m.cols() && hermiticity_error(m) <= rtol;
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

inline Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

// Kronecker product with A as the slow index: row (iA*dB + iB).
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  check_square(a, "tensor");
  check_square(b, "tensor");
  check_finite(a, "tensor");
  check_finite(b, "tensor");
  const Eigen::Index da = a.rows();
  const Eigen::Index db = b.rows();
  if (da * db > max_dim) {
    throw DimensionError("tensor: product dimension " + std::to_string(da * db) +
                         " exceeds the supported maximum " + std::to_string(max_dim));
  }
  Matrix out(da * db, da * db);
  for (Eigen::Index ia = 0; ia < da; ++ia) {
    for (Eigen::Index ja = 0; ja < da; ++ja) {
      out.block(ia * db, ja * db, db, db) = a(ia, ja) * b;
    }
  }
  return out;
}

inline Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, Subsystem keep) {
  check_square(m, "partial_trace");
  check_finite(m, "partial_trace");
  if (dim_a < 1 || dim_b < 1 || m.rows() != Eigen::Index(dim_a) * dim_b) {
    throw DimensionError("partial_trace: matrix dim " + std::to_string(m.rows()) +
                         " does not factor as " + std::to_string(dim_a) + "x" +
                         std::to_string(dim_b));
  }
  if (keep == Subsystem::a) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i) {
      for (int j = 0; j < dim_a; ++j) {
        for (int k = 0; k < dim_b; ++k) {
          out(i, j) += m(i * dim_b + k, j * dim_b + k);
        }
      }
    }
    return out;
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i) {
    for (int j = 0; j < dim_b; ++j) {
      for (int k = 0; k < dim_a; ++k) {
        out(i, j) += m(k * dim_b + i, k * dim_b + j);
      }
    }
  }
  return out;
}

struct EigenDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, orthonormal, phase-fixed
};

// Hermitian eigendecomposition. The input is symmetrized first; ordering is
// ascending and each eigenvector's largest-magnitude component is made real
// positive so repeated runs produce identical bases.
inline EigenDecomposition eigh(const Matrix& m, double hermiticity_rtol = 1e-8) {
  check_square(m, "eigh");
  check_finite(m, "eigh");
  if (hermiticity_error(m) > hermiticity_rtol) {
    throw ValidationError("eigh: input is not Hermitian (relative deviation " +
                          std::to_string(hermiticity_error(m)) + ")");
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigendecomposition failed to converge");
  }
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < out.eigenvectors.rows(); ++r) {
      const double mag = std::abs(out.eigenvectors(r, c));
      if (mag > best + 1e-14) {
        best = mag;
        pivot = r;
      }
    }
    const Complex z = out.eigenvectors(pivot, c);
    if (std::abs(z) > 0) {
      out.eigenvectors.col(c) *= std::conj(z) / std::abs(z);
    }
  }
  return out;
}

// f applied to the spectrum of a Hermitian matrix: V f(diag) V^dagger.
template <typename F>
Matrix hermitian_function(const Matrix& m, F&& f) {
  const EigenDecomposition ed = eigh(m);
  Vector fl(ed.eigenvalues.size());
  for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
    fl(i) = Complex(f(ed.eigenvalues(i)));
  }
  return ed.eigenvectors * fl.asDiagonal() * ed.eigenvectors.adjoint();
}

// e^{s m} for Hermitian m and complex scalar s (unitary for imaginary s).
inline Matrix matrix_exp_scaled(const Matrix& m, Complex s) {
  return hermitian_function(m, [s](double lambda) { return std::exp(s * lambda); });
}

// log on the support: eigenvalues clamped below at 0, log skipped off-support.
inline Matrix matrix_log(const Matrix& m) {
  return hermitian_function(m, [](double lambda) -> Complex {
    return lambda > 0.0 ? Complex(std::log(lambda)) : Complex(0.0);
  });
}

// x log x with the 0 log 0 = 0 convention, eigenvalues clamped below at 0.
inline Matrix matrix_xlogx(const Matrix& m) {
  return hermitian_function(m, [](double lambda) -> Complex {
    return lambda > 0.0 ? Complex(lambda * std::log(lambda)) : Complex(0.0);
  });
}

}  // namespace discordlab
