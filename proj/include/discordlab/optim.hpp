// Small derivative-free optimization helpers used by the measurement-basis
// search and the trace fits: Nelder-Mead simplex, local unitary charts,
// golden-section line search, and polynomial step-size extrapolation.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "discordlab/qmat.hpp"

namespace discordlab {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Terminates when the simplex value spread drops below ftol.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, double step, double ftol,
                                 int max_iterations) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  SimplexResult res;
  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = vals[idx[i]];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    order();
    if (vals[n] - vals[0] < ftol) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / double(n);
    }
    auto blend = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + coeff * (pts[n][j] - centroid[j]);
      return x;
    };
    const std::vector<double> xr = blend(-1.0);
    const double fr = f(xr);
    if (fr < vals[0]) {
      const std::vector<double> xe = blend(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const std::vector<double> xc = blend(fr < vals[n] ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, vals[n])) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  res.x = pts[0];
  res.value = vals[0];
  return res;
}

// Basis of traceless Hermitian generators of su(d), d^2 - 1 of them:
// symmetric and antisymmetric off-diagonal pairs plus diagonal ladders.
inline std::vector<Matrix> su_generators(int d) {
  std::vector<Matrix> gens;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix sym = Matrix::Zero(d, d);
      sym(j, k) = 1;
      sym(k, j) = 1;
      gens.push_back(sym);
      Matrix asym = Matrix::Zero(d, d);
      asym(j, k) = Complex(0, -1);
      asym(k, j) = Complex(0, 1);
      gens.push_back(asym);
    }
  }
  for (int l = 1; l < d; ++l) {
    Matrix diag = Matrix::Zero(d, d);
    for (int j = 0; j < l; ++j) diag(j, j) = 1;
    diag(l, l) = -l;
    diag *= 1.0 / std::sqrt(double(l) * (l + 1));
    gens.push_back(diag);
  }
  return gens;
}

// Chart around a base unitary: U(x) = U0 exp(i sum x_k G_k), x in R^{d^2-1}.
inline Matrix chart_unitary(const Matrix& base, const std::vector<Matrix>& gens,
                            const std::vector<double>& x) {
  Matrix h = Matrix::Zero(base.rows(), base.cols());
  for (std::size_t k = 0; k < gens.size(); ++k) h += x[k] * gens[k];
  return base * matrix_exp_scaled(h, Complex(0, 1));
}

// Orthonormal qubit pair (polar, azimuth) on the Bloch sphere as columns.
inline Matrix bloch_basis(double polar, double azimuth) {
  const double c = std::cos(polar / 2.0);
  const double s = std::sin(polar / 2.0);
  const Complex phase = std::exp(Complex(0, azimuth));
  Matrix u(2, 2);
  u(0, 0) = c;
  u(1, 0) = phase * s;
  u(0, 1) = -std::conj(phase) * s;
  u(1, 1) = c;
  return u;
}

// Haar-ish random unitary from a seeded Ginibre draw + QR with phase fix.
inline Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex z = r(j, j);
    if (std::abs(z) > 0) q.col(j) *= z / std::abs(z);
  }
  return q;
}

// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             int iterations = 120) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Neville polynomial extrapolation of y(h) to h = 0.
inline double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& y) {
  std::vector<double> tab = y;
  const std::size_t n = h.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      tab[i] = (h[i + m] * tab[i] - h[i] * tab[i + 1]) / (h[i + m] - h[i]);
    }
  }
  return tab[0];
}

}  // namespace discordlab
