// Density matrices with subsystem metadata, Gibbs states, von Neumann
// entropy and energy expectations. Entropies are in nats throughout;
// conversion to bits happens only at reporting boundaries.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "discordlab/qmat.hpp"

namespace discordlab {

inline constexpr double boltzmann_si = 1.380649e-23;  // J/K
inline constexpr double nats_to_bits = 1.4426950408889634;  // 1/ln 2

// -sum lambda ln lambda over a spectrum, 0 ln 0 = 0, tiny negatives ignored.
inline double entropy_of_spectrum(const RealVector& spectrum) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double p = spectrum(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

// Entropy of a Hermitian PSD matrix straight from its eigenvalues.
inline double entropy_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()),
                                               Eigen::EigenvaluesOnly);
  return entropy_of_spectrum(solver.eigenvalues());
}

struct HermitianOperator {
  Matrix mat;
  std::string label;

  HermitianOperator(Matrix m, std::string name = "") : mat(std::move(m)), label(std::move(name)) {
    check_square(mat, "HermitianOperator");
    check_finite(mat, "HermitianOperator");
    if (hermiticity_error(mat) > 1e-8) {
      throw ValidationError("HermitianOperator '" + label + "': not Hermitian (relative deviation " +
                            std::to_string(hermiticity_error(mat)) + ")");
    }
    mat = 0.5 * (mat + mat.adjoint().eval());
  }

  int dim() const { return static_cast<int>(mat.rows()); }
};

// Hermitian, PSD, unit-trace matrix with (dA, dB) subsystem split (dB = 1 for
// monopartite states). Construction validates, clips round-off negatives in
// the spectrum and renormalizes; the clipped spectrum is kept for reuse.
class DensityMatrix {
 public:
  DensityMatrix(Matrix m, int dim_a, int dim_b = 1) : dim_a_(dim_a), dim_b_(dim_b) {
    check_square(m, "DensityMatrix");
    check_finite(m, "DensityMatrix");
    if (dim_a_ < 1 || dim_b_ < 1 || m.rows() != Eigen::Index(dim_a_) * dim_b_) {
      throw DimensionError("DensityMatrix: dim " + std::to_string(m.rows()) +
                           " does not match subsystem dims (" + std::to_string(dim_a_) + ", " +
                           std::to_string(dim_b_) + ")");
    }
    if (hermiticity_error(m) > 1e-8) {
      throw ValidationError("DensityMatrix: not Hermitian (relative deviation " +
                            std::to_string(hermiticity_error(m)) + ")");
    }
    const double tr = m.trace().real();
    if (std::abs(m.trace() - Complex(1.0)) > 1e-10) {
      throw ValidationError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
    }
    EigenDecomposition ed = eigh(m);
    if (ed.eigenvalues.minCoeff() < -1e-10) {
      throw ValidationError("DensityMatrix: negative eigenvalue " +
                            std::to_string(ed.eigenvalues.minCoeff()) +
                            " beyond the round-off threshold");
    }
    spectrum_ = ed.eigenvalues.cwiseMax(0.0);
    spectrum_ /= spectrum_.sum();
    mat_ = ed.eigenvectors * spectrum_.cast<Complex>().asDiagonal() * ed.eigenvectors.adjoint();
    mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
  }

  const Matrix& mat() const { return mat_; }
  const RealVector& spectrum() const { return spectrum_; }  // ascending
  int dim() const { return dim_a_ * dim_b_; }
  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  bool bipartite() const { return dim_a_ > 1 && dim_b_ > 1; }

  DensityMatrix reduced(Subsystem keep) const {
    Matrix r = partial_trace(mat_, dim_a_, dim_b_, keep);
    return DensityMatrix(std::move(r), keep == Subsystem::a ? dim_a_ : dim_b_, 1);
  }

  double purity() const { return (mat_ * mat_).trace().real(); }

 private:
  Matrix mat_;
  RealVector spectrum_;
  int dim_a_;
  int dim_b_;
};

// rho_A tensor rho_B with the subsystem split recorded.
inline DensityMatrix product_state(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.mat(), b.mat()), a.dim(), b.dim());
}

struct ThermalSpec {
  HermitianOperator hamiltonian;
  double temperature;                  // K, or dimensionless kT when boltzmann = 1
  double boltzmann = boltzmann_si;     // J/K; set to 1 for dimensionless work

  ThermalSpec(HermitianOperator h, double t, double k = boltzmann_si)
      : hamiltonian(std::move(h)), temperature(t), boltzmann(k) {
    if (!(temperature > 0.0)) {
      throw ValidationError("ThermalSpec: temperature must be positive, got " +
                            std::to_string(temperature));
    }
    if (!(boltzmann > 0.0)) {
      throw ValidationError("ThermalSpec: Boltzmann constant must be positive");
    }
  }
};

// e^{-H/kT} / Z, diagonal in the eigenbasis of H. The ground energy is
// subtracted before exponentiation so low temperatures cannot overflow.
inline DensityMatrix thermal_state(const ThermalSpec& spec) {
  const EigenDecomposition ed = eigh(spec.hamiltonian.mat);
  const double beta = 1.0 / (spec.boltzmann * spec.temperature);
  const double ground = ed.eigenvalues.minCoeff();
  RealVector weights(ed.eigenvalues.size());
  for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
    weights(i) = std::exp(-beta * (ed.eigenvalues(i) - ground));
  }
  weights /= weights.sum();
  Matrix rho = ed.eigenvectors * weights.cast<Complex>().asDiagonal() * ed.eigenvectors.adjoint();
  return DensityMatrix(std::move(rho), static_cast<int>(ed.eigenvalues.size()), 1);
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  return entropy_of_spectrum(rho.spectrum());
}

// tr(H rho); the imaginary part must vanish to round-off.
inline double energy(const DensityMatrix& rho, const HermitianOperator& h) {
  if (h.dim() != rho.dim()) {
    throw DimensionError("energy: operator dim " + std::to_string(h.dim()) +
                         " does not match state dim " + std::to_string(rho.dim()));
  }
  const Complex e = (h.mat * rho.mat()).trace();
  const double scale = std::max(1.0, h.mat.norm());
  if (std::abs(e.imag()) > 1e-10 * scale) {
    throw NumericalError("energy: expectation has non-negligible imaginary part " +
                         std::to_string(e.imag()));
  }
  return e.real();
}

}  // namespace discordlab
