// Mutual information, projective measurement channels, Schmidt bases with
// degenerate-subspace handling, diagonal discord, and discord minimized over
// rank-one projective measurements.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "discordlab/optim.hpp"
#include "discordlab/qmat.hpp"
#include "discordlab/states.hpp"

namespace discordlab {

// D(A->B) is induced by measuring A; D(B->A) by measuring B.
enum class Direction { a_to_b, b_to_a };

inline Subsystem measured_subsystem(Direction d) {
  return d == Direction::a_to_b ? Subsystem::a : Subsystem::b;
}

inline const char* to_string(Direction d) { return d == Direction::a_to_b ? "a2b" : "b2a"; }

enum class DiscordKind { diagonal, optimized };

inline const char* to_string(DiscordKind k) { return k == DiscordKind::diagonal ? "diag" : "opt"; }

// Complete set of rank-one orthonormal projectors on one subsystem.
struct ProjectiveMeasurement {
  Subsystem subsystem;
  std::vector<Vector> basis;

  ProjectiveMeasurement(Subsystem s, std::vector<Vector> vectors)
      : subsystem(s), basis(std::move(vectors)) {
    if (basis.empty()) throw ValidationError("ProjectiveMeasurement: empty basis");
    const Eigen::Index d = basis.front().size();
    Matrix completeness = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].size() != d) throw DimensionError("ProjectiveMeasurement: mixed vector sizes");
      for (std::size_t j = 0; j <= i; ++j) {
        const Complex overlap = basis[j].dot(basis[i]);
        const double target = i == j ? 1.0 : 0.0;
        if (std::abs(overlap - Complex(target)) > 1e-10) {
          throw ValidationError("ProjectiveMeasurement: basis is not orthonormal (deviation " +
                                std::to_string(std::abs(overlap - Complex(target))) + ")");
        }
      }
      completeness += basis[i] * basis[i].adjoint();
    }
    if ((completeness - Matrix::Identity(d, d)).norm() > 1e-10) {
      throw ValidationError("ProjectiveMeasurement: projectors do not resolve the identity");
    }
  }

  int dim() const { return static_cast<int>(basis.front().size()); }

  Matrix as_matrix() const {
    Matrix u(dim(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) u.col(i) = basis[i];
    return u;
  }
};

struct OptimizerOptions {
  int grid_polar = 24;       // qubit chart: polar grid points
  int grid_azimuth = 24;     // qubit chart: azimuth grid points
  int multi_starts = 24;     // random starts for measured dim >= 3
  int refine_starts = 5;     // local refinements launched from the best starts
  double tol = 1e-9;         // convergence tolerance, nats
  int max_iterations = 400;  // simplex budget per refinement
  int max_restarts = 3;      // extra refinement rounds before flagging
  std::uint64_t seed = 0x10a5c0bd;
};

struct DiscordReport {
  double mutual_info;           // nats
  double measured_mutual_info;  // nats
  double discord;               // nats
  ProjectiveMeasurement basis;
  DiscordKind kind;
  Direction direction;
  bool converged;
};

inline double mutual_information(const DensityMatrix& rho) {
  if (!rho.bipartite()) {
    throw ValidationError("mutual_information: state is not bipartite");
  }
  const double s_a = von_neumann_entropy(rho.reduced(Subsystem::a));
  const double s_b = von_neumann_entropy(rho.reduced(Subsystem::b));
  const double s_ab = von_neumann_entropy(rho);
  return s_a + s_b - s_ab;
}

namespace detail {

inline RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() == 1) {
    RealVector v(1);
    v(0) = m(0, 0).real();
    return v;
  }
  if (m.rows() == 2) {
    const double a = m(0, 0).real();
    const double b = m(1, 1).real();
    const double half = 0.5 * std::sqrt(std::max(0.0, (a - b) * (a - b) + 4.0 * std::norm(m(0, 1))));
    RealVector v(2);
    v(0) = 0.5 * (a + b) - half;
    v(1) = 0.5 * (a + b) + half;
    return v;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// Unnormalized conditional block for one measurement outcome vector e:
// the kept-subsystem matrix <e| rho |e>, whose trace is the outcome probability.
inline Matrix outcome_block(const Matrix& rho, int dim_a, int dim_b, Subsystem measured,
                            const Vector& e) {
  if (measured == Subsystem::b) {
    Matrix block = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i) {
      for (int j = 0; j < dim_a; ++j) {
        Complex acc = 0;
        for (int k = 0; k < dim_b; ++k) {
          for (int l = 0; l < dim_b; ++l) {
            acc += std::conj(e(k)) * rho(i * dim_b + k, j * dim_b + l) * e(l);
          }
        }
        block(i, j) = acc;
      }
    }
    return block;
  }
  Matrix block = Matrix::Zero(dim_b, dim_b);
  for (int k = 0; k < dim_b; ++k) {
    for (int l = 0; l < dim_b; ++l) {
      Complex acc = 0;
      for (int i = 0; i < dim_a; ++i) {
        for (int j = 0; j < dim_a; ++j) {
          acc += std::conj(e(i)) * rho(i * dim_b + k, j * dim_b + l) * e(j);
        }
      }
      block(k, l) = acc;
    }
  }
  return block;
}

// -sum lambda ln lambda over the (unnormalized) block spectrum.
inline double block_entropy_term(const Matrix& block) {
  return entropy_of_spectrum(hermitian_eigenvalues(block));
}

// I(kept : measured~) for the basis given as unitary columns, using
// S(sigma) = H(p) + sum_b p_b S(rho|b) without building the dephased state.
inline double measured_mutual_information(const Matrix& rho, int dim_a, int dim_b,
                                          Subsystem measured, const Matrix& basis_columns,
                                          double entropy_kept) {
  double s_sigma = 0.0;
  double h_outcomes = 0.0;
  for (Eigen::Index c = 0; c < basis_columns.cols(); ++c) {
    const Matrix block = outcome_block(rho, dim_a, dim_b, measured, basis_columns.col(c));
    s_sigma += block_entropy_term(block);
    const double p = block.trace().real();
    if (p > 0.0) h_outcomes -= p * std::log(p);
  }
  return entropy_kept + h_outcomes - s_sigma;
}

inline void fix_column_phases(Matrix& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      if (std::abs(u(r, c)) > best + 1e-14) {
        best = std::abs(u(r, c));
        pivot = r;
      }
    }
    const Complex z = u(pivot, c);
    if (std::abs(z) > 0) u.col(c) *= std::conj(z) / std::abs(z);
  }
}

// Deterministic order on canonicalized bases; used only to break value ties.
inline bool basis_less(const Matrix& lhs, const Matrix& rhs) {
  for (Eigen::Index c = 0; c < lhs.cols(); ++c) {
    for (Eigen::Index r = 0; r < lhs.rows(); ++r) {
      const Complex a = lhs(r, c), b = rhs(r, c);
      if (std::abs(a.real() - b.real()) > 1e-12) return a.real() < b.real();
      if (std::abs(a.imag() - b.imag()) > 1e-12) return a.imag() < b.imag();
    }
  }
  return false;
}

struct BasisSearchOutcome {
  Matrix unitary;
  double value = 0.0;
  bool converged = false;
};

// Multi-start minimization over d x d unitaries: a deterministic coarse grid
// (Bloch angles for qubits, seeded random unitaries above) picks starting
// points, a simplex search over the local su(d) chart refines the best few.
inline BasisSearchOutcome minimize_over_unitaries(
    int d, const std::function<double(const Matrix&)>& objective, const OptimizerOptions& opts,
    const std::vector<Matrix>& extra_starts = {}) {
  struct Start {
    Matrix u;
    double value;
  };
  std::vector<Start> starts;
  if (d == 2) {
    for (int i = 0; i < opts.grid_polar; ++i) {
      const double polar = M_PI * double(i) / double(std::max(1, opts.grid_polar - 1));
      for (int j = 0; j < opts.grid_azimuth; ++j) {
        const double azimuth = 2.0 * M_PI * double(j) / double(opts.grid_azimuth);
        Matrix u = bloch_basis(polar, azimuth);
        starts.push_back({u, objective(u)});
      }
    }
  } else {
    std::mt19937_64 rng(opts.seed);
    Matrix id = Matrix::Identity(d, d);
    starts.push_back({id, objective(id)});
    for (int i = 0; i < opts.multi_starts; ++i) {
      Matrix u = random_unitary(d, rng);
      starts.push_back({u, objective(u)});
    }
  }
  std::sort(starts.begin(), starts.end(),
            [](const Start& a, const Start& b) { return a.value < b.value; });
  if (int(starts.size()) > opts.refine_starts) starts.resize(opts.refine_starts);
  for (const Matrix& u : extra_starts) starts.push_back({u, objective(u)});

  const std::vector<Matrix> gens = su_generators(d);
  const double ftol = std::min(1e-12, opts.tol * 1e-3);
  BasisSearchOutcome best;
  bool have_best = false;
  for (const Start& start : starts) {
    auto f = [&](const std::vector<double>& x) {
      return objective(chart_unitary(start.u, gens, x));
    };
    SimplexResult run = nelder_mead(f, std::vector<double>(gens.size(), 0.0), 0.15, ftol,
                                    opts.max_iterations);
    for (int r = 0; r < opts.max_restarts && !run.converged; ++r) {
      SimplexResult retry = nelder_mead(f, run.x, 0.05, ftol, opts.max_iterations);
      if (retry.value <= run.value) run = retry;
    }
    Matrix u = chart_unitary(start.u, gens, run.x);
    fix_column_phases(u);
    const bool better =
        !have_best || run.value < best.value - 1e-12 ||
        (std::abs(run.value - best.value) <= 1e-12 && basis_less(u, best.unitary));
    if (better) {
      best.unitary = u;
      best.value = run.value;
      best.converged = run.converged;
      have_best = true;
    }
  }
  return best;
}

}  // namespace detail

// Dephasing channel: Sigma_b P_b rho P_b with P_b rank-one on the measured
// subsystem, plus the outcome probabilities.
inline std::pair<DensityMatrix, std::vector<double>> measure(const DensityMatrix& rho,
                                                             const ProjectiveMeasurement& m) {
  const int d_meas = m.subsystem == Subsystem::a ? rho.dim_a() : rho.dim_b();
  if (m.dim() != d_meas) {
    throw DimensionError("measure: basis dim " + std::to_string(m.dim()) +
                         " does not match measured subsystem dim " + std::to_string(d_meas));
  }
  if (int(m.basis.size()) != d_meas) {
    throw ValidationError("measure: basis with " + std::to_string(m.basis.size()) +
                          " vectors is not complete on dim " + std::to_string(d_meas));
  }
  Matrix dephased = Matrix::Zero(rho.dim(), rho.dim());
  std::vector<double> probs;
  probs.reserve(m.basis.size());
  const Matrix id_a = Matrix::Identity(rho.dim_a(), rho.dim_a());
  const Matrix id_b = Matrix::Identity(rho.dim_b(), rho.dim_b());
  for (const Vector& e : m.basis) {
    const Matrix proj = e * e.adjoint();
    const Matrix full = m.subsystem == Subsystem::a ? tensor(proj, id_b) : tensor(id_a, proj);
    const Matrix term = full * rho.mat() * full;
    probs.push_back(term.trace().real());
    dephased += term;
  }
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-10) {
    throw NumericalError("measure: outcome probabilities sum to " + std::to_string(total));
  }
  return {DensityMatrix(std::move(dephased), rho.dim_a(), rho.dim_b()), std::move(probs)};
}

namespace detail {

struct SchmidtBasisResult {
  ProjectiveMeasurement measurement;
  bool converged = true;
};

inline SchmidtBasisResult schmidt_basis_impl(const DensityMatrix& state, Subsystem subsystem,
                                             const std::optional<DensityMatrix>& context,
                                             const OptimizerOptions& opts) {
  const DensityMatrix reduced = state.bipartite() ? state.reduced(subsystem) : state;
  std::optional<DensityMatrix> full = context;
  if (!full && state.bipartite()) full = state;
  if (full && !full->bipartite()) {
    throw ValidationError("schmidt_basis: context state is not bipartite");
  }

  const EigenDecomposition ed = eigh(reduced.mat());
  const int d = static_cast<int>(ed.eigenvalues.size());
  Matrix columns = ed.eigenvectors;
  bool converged = true;

  // Cluster eigenvalues whose relative gap is below threshold; inside each
  // degenerate cluster the basis is free, so pick the rotation that minimizes
  // the post-measurement entropy of the full state.
  const double gap_threshold = 1e-9 * std::max(ed.eigenvalues.maxCoeff(), 1e-30);
  std::vector<std::pair<int, int>> clusters;  // [begin, end)
  int begin = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || ed.eigenvalues(i) - ed.eigenvalues(i - 1) > gap_threshold) {
      clusters.emplace_back(begin, i);
      begin = i;
    }
  }
  if (full) {
    for (const auto& [lo, hi] : clusters) {
      const int g = hi - lo;
      if (g < 2) continue;
      const Matrix cluster_cols = columns.block(0, lo, d, g);
      auto objective = [&](const Matrix& w) {
        const Matrix rotated = cluster_cols * w;
        double total = 0.0;
        for (Eigen::Index c = 0; c < rotated.cols(); ++c) {
          total += block_entropy_term(outcome_block(full->mat(), full->dim_a(), full->dim_b(),
                                                    subsystem, rotated.col(c)));
        }
        return total;
      };
      const BasisSearchOutcome outcome = minimize_over_unitaries(g, objective, opts);
      columns.block(0, lo, d, g) = cluster_cols * outcome.unitary;
      converged = converged && outcome.converged;
    }
  }
  fix_column_phases(columns);
  std::vector<Vector> basis;
  basis.reserve(d);
  for (int c = 0; c < d; ++c) basis.push_back(columns.col(c));
  return {ProjectiveMeasurement(subsystem, std::move(basis)), converged};
}

}  // namespace detail

// Eigenbasis of the reduced state on `subsystem`. Degenerate eigenspaces are
// resolved against the full state (the bipartite input itself, or `context`
// when the input is already reduced) by minimizing the entropy increase.
inline ProjectiveMeasurement schmidt_basis(const DensityMatrix& state, Subsystem subsystem,
                                           const std::optional<DensityMatrix>& context = {},
                                           const OptimizerOptions& opts = {}) {
  return detail::schmidt_basis_impl(state, subsystem, context, opts).measurement;
}

namespace detail {

inline DiscordReport make_report(double mi, double measured_mi, ProjectiveMeasurement basis,
                                 DiscordKind kind, Direction direction, bool converged) {
  const double discord = mi - measured_mi;
  if (discord < -1e-9) {
    throw NumericalError("discord: measured mutual information exceeds mutual information by " +
                         std::to_string(-discord));
  }
  return DiscordReport{mi, measured_mi, discord, std::move(basis), kind, direction, converged};
}

}  // namespace detail

// Discord with the measurement fixed to the measured subsystem's Schmidt
// basis (the energy eigenbasis for thermal states).
inline DiscordReport diagonal_discord(const DensityMatrix& rho, Direction direction,
                                      const OptimizerOptions& opts = {}) {
  if (!rho.bipartite()) throw ValidationError("diagonal_discord: state is not bipartite");
  const Subsystem meas = measured_subsystem(direction);
  const Subsystem kept = meas == Subsystem::a ? Subsystem::b : Subsystem::a;
  detail::SchmidtBasisResult schmidt = detail::schmidt_basis_impl(rho, meas, rho, opts);
  const double entropy_kept = von_neumann_entropy(rho.reduced(kept));
  const double measured_mi = detail::measured_mutual_information(
      rho.mat(), rho.dim_a(), rho.dim_b(), meas, schmidt.measurement.as_matrix(), entropy_kept);
  return detail::make_report(mutual_information(rho), measured_mi, std::move(schmidt.measurement),
                             DiscordKind::diagonal, direction, schmidt.converged);
}

// Discord minimized over rank-one projective measurements on the measured
// subsystem. The Schmidt basis always seeds the refinement, so the result
// never exceeds the diagonal discord (up to the reporting tolerance).
inline DiscordReport discord(const DensityMatrix& rho, Direction direction,
                             const OptimizerOptions& opts = {}) {
  if (!rho.bipartite()) throw ValidationError("discord: state is not bipartite");
  const Subsystem meas = measured_subsystem(direction);
  const Subsystem kept = meas == Subsystem::a ? Subsystem::b : Subsystem::a;
  const int d = meas == Subsystem::a ? rho.dim_a() : rho.dim_b();
  if (d > 4) {
    throw DimensionError("discord: measured subsystem dim " + std::to_string(d) +
                         " exceeds the optimizer chart limit 4");
  }
  const double entropy_kept = von_neumann_entropy(rho.reduced(kept));
  const double mi = mutual_information(rho);
  auto objective = [&](const Matrix& u) {
    return -detail::measured_mutual_information(rho.mat(), rho.dim_a(), rho.dim_b(), meas, u,
                                                entropy_kept);
  };
  detail::SchmidtBasisResult schmidt = detail::schmidt_basis_impl(rho, meas, rho, opts);
  const detail::BasisSearchOutcome outcome =
      detail::minimize_over_unitaries(d, objective, opts, {schmidt.measurement.as_matrix()});
  std::vector<Vector> basis;
  basis.reserve(d);
  for (int c = 0; c < d; ++c) basis.push_back(outcome.unitary.col(c));
  return detail::make_report(mi, -outcome.value, ProjectiveMeasurement(meas, std::move(basis)),
                             DiscordKind::optimized, direction, outcome.converged);
}

}  // namespace discordlab
