// Transient surface-temperature trace reduction: synthetic trace generation,
// CSV load/save, regime segmentation, lumped-film exponential tail fitting,
// and conversion of the crossing-point heat flux into a discord production
// rate per unit area.
#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "discordlab/optim.hpp"
#include "discordlab/qmat.hpp"
#include "discordlab/states.hpp"

namespace discordlab {

struct TraceSample {
  double t;      // trace time units (seconds unless rescaled via config)
  double value;  // kelvin or normalized, per value_kind
};

enum class ValueKind { temperature_k, normalized };

struct TimeTrace {
  std::vector<TraceSample> samples;
  ValueKind value_kind = ValueKind::temperature_k;
  std::optional<double> peak_delta_t;  // K; calibration, required when normalized

  void validate() const {
    if (samples.size() < 16) {
      throw ValidationError("TimeTrace: need at least 16 samples, got " +
                            std::to_string(samples.size()));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!std::isfinite(samples[i].t) || !std::isfinite(samples[i].value)) {
        throw ValidationError("TimeTrace: non-finite sample at row " + std::to_string(i + 1));
      }
      if (i > 0 && !(samples[i].t > samples[i - 1].t)) {
        throw ValidationError("TimeTrace: time not strictly increasing at row " +
                              std::to_string(i + 1));
      }
      if (value_kind == ValueKind::normalized &&
          (samples[i].value < 0.0 || samples[i].value > 1.0 + 1e-6)) {
        throw ValidationError("TimeTrace: normalized value out of [0, 1] at row " +
                              std::to_string(i + 1));
      }
    }
  }
};

struct ExperimentConfig {
  double film_thickness = 70e-9;        // m
  double heat_capacity = 2.42e6;        // J m^-3 K^-1 (volumetric)
  double substrate_temperature = 300.0; // K
  double boltzmann = boltzmann_si;      // J/K
  double time_unit_s = 1.0;             // seconds per trace time unit

  void validate() const {
    if (!(film_thickness > 0) || !(heat_capacity > 0) || !(substrate_temperature > 0) ||
        !(boltzmann > 0) || !(time_unit_s > 0)) {
      throw ValidationError("ExperimentConfig: all parameters must be positive");
    }
  }
};

struct SynthesisParams {
  double t_c = 60e-12;       // s, crossing between rise and decay regimes
  double tau = 1e-9;         // s, tail decay time
  double delta_t0 = 0.2;     // K, film-substrate temperature contrast at t_c
  double t_b = 300.0;        // K, substrate temperature
  double noise_sigma = 0.0;  // Gaussian noise, fraction of delta_t0
  std::uint64_t seed = 1;
  int n = 600;
  double duration = 6e-9;       // s
  double rise_fraction = 0.25;  // rise time constant as a fraction of t_c
};

// Two-regime synthetic trace: saturating rise up to t_c (the electron-lattice
// equilibration stand-in), exponential decay past it, continuous at t_c.
inline TimeTrace synthesize_trace(const SynthesisParams& p) {
  if (!(p.t_c > 0) || !(p.tau > 0) || !(p.delta_t0 > 0) || !(p.t_b > 0) || !(p.duration > p.t_c) ||
      p.n < 16 || !(p.rise_fraction > 0) || p.noise_sigma < 0) {
    throw ValidationError("synthesize_trace: parameters out of range");
  }
  const double t_rise = p.rise_fraction * p.t_c;
  const double rise_norm = 1.0 - std::exp(-p.t_c / t_rise);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TimeTrace trace;
  trace.value_kind = ValueKind::temperature_k;
  trace.samples.reserve(p.n);
  for (int i = 0; i < p.n; ++i) {
    const double t = p.duration * double(i) / double(p.n - 1);
    double temp;
    if (t < p.t_c) {
      temp = p.t_b + p.delta_t0 * (1.0 - std::exp(-t / t_rise)) / rise_norm;
    } else {
      temp = p.t_b + p.delta_t0 * std::exp(-(t - p.t_c) / p.tau);
    }
    if (p.noise_sigma > 0) temp += p.noise_sigma * p.delta_t0 * gauss(rng);
    trace.samples.push_back({t, temp});
  }
  trace.validate();
  return trace;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& field, std::size_t row) {
  const std::string s = trim(field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ValidationError("trace CSV: unparseable number '" + s + "' at row " +
                          std::to_string(row));
  }
  return v;
}

}  // namespace detail

// CSV with header time_s,temp_K (kelvin) or time_s,norm (normalized).
inline TimeTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_trace: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("load_trace: empty file '" + path + "'");
  const std::string header = detail::trim(line);
  TimeTrace trace;
  if (header == "time_s,temp_K") {
    trace.value_kind = ValueKind::temperature_k;
  } else if (header == "time_s,norm") {
    trace.value_kind = ValueKind::normalized;
  } else {
    throw ValidationError("load_trace: expected header 'time_s,temp_K' or 'time_s,norm', got '" +
                          header + "'");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const std::size_t comma = stripped.find(',');
    if (comma == std::string::npos || stripped.find(',', comma + 1) != std::string::npos) {
      throw ValidationError("load_trace: expected two columns at row " + std::to_string(row));
    }
    const double t = detail::parse_double(stripped.substr(0, comma), row);
    const double v = detail::parse_double(stripped.substr(comma + 1), row);
    if (!std::isfinite(t) || !std::isfinite(v)) {
      throw ValidationError("load_trace: non-finite value at row " + std::to_string(row));
    }
    trace.samples.push_back({t, v});
  }
  trace.validate();
  return trace;
}

inline void save_trace(const TimeTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("save_trace: cannot open '" + path + "' for writing");
  out << (trace.value_kind == ValueKind::temperature_k ? "time_s,temp_K\n" : "time_s,norm\n");
  char buf[64];
  for (const TraceSample& s : trace.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", s.t, s.value);
    out << buf;
  }
}

namespace detail {

struct PreparedTrace {
  std::vector<double> t;     // SI seconds
  std::vector<double> temp;  // kelvin
};

inline PreparedTrace prepare_trace(const TimeTrace& trace, const ExperimentConfig& config) {
  trace.validate();
  config.validate();
  if (trace.value_kind == ValueKind::normalized && !trace.peak_delta_t) {
    throw ValidationError("trace is normalized; a peak delta-T calibration (kelvin) is required");
  }
  PreparedTrace out;
  out.t.reserve(trace.samples.size());
  out.temp.reserve(trace.samples.size());
  for (const TraceSample& s : trace.samples) {
    out.t.push_back(s.t * config.time_unit_s);
    if (trace.value_kind == ValueKind::temperature_k) {
      out.temp.push_back(s.value);
    } else {
      out.temp.push_back(config.substrate_temperature + s.value * *trace.peak_delta_t);
    }
  }
  return out;
}

struct TailFitRaw {
  double tau = 0.0;
  double delta_t0 = 0.0;
  double sse = 0.0;
  bool at_bound = false;
};

// Least squares for T(t) = T_B + dT0 exp(-(t - t_c)/tau) on samples[i0..):
// dT0 is linear given tau, tau comes from a golden-section over log tau.
inline TailFitRaw fit_tail_raw(const PreparedTrace& tr, std::size_t i0, double t_c, double t_b,
                               int iterations) {
  const std::size_t n = tr.t.size();
  const double span = tr.t.back() - t_c;
  const double log_lo = std::log(std::max(span * 1e-6, 1e-300));
  const double log_hi = std::log(span * 1e4);
  auto eval = [&](double log_tau, TailFitRaw* fit) {
    const double tau = std::exp(log_tau);
    double num = 0.0, den = 0.0;
    for (std::size_t i = i0; i < n; ++i) {
      const double e = std::exp(-(tr.t[i] - t_c) / tau);
      num += e * (tr.temp[i] - t_b);
      den += e * e;
    }
    const double dt0 = den > 0 ? num / den : 0.0;
    double sse = 0.0;
    for (std::size_t i = i0; i < n; ++i) {
      const double r = (tr.temp[i] - t_b) - dt0 * std::exp(-(tr.t[i] - t_c) / tau);
      sse += r * r;
    }
    if (fit) {
      fit->tau = tau;
      fit->delta_t0 = dt0;
      fit->sse = sse;
    }
    return sse;
  };
  const double best_log_tau =
      golden_section([&](double lt) { return eval(lt, nullptr); }, log_lo, log_hi, iterations);
  TailFitRaw fit;
  eval(best_log_tau, &fit);
  fit.at_bound = best_log_tau < log_lo + 1e-3 * (log_hi - log_lo) ||
                 best_log_tau > log_hi - 1e-3 * (log_hi - log_lo);
  return fit;
}

// Saturating-rise fit on samples[0..i0), continuous with the tail start value.
inline double fit_early_sse(const PreparedTrace& tr, std::size_t i0, double t_c, double t_b,
                            double delta_t0_at_tc, int iterations) {
  if (i0 == 0) return 0.0;
  auto sse_for = [&](double log_tr) {
    const double t_rise = std::exp(log_tr);
    const double scale = delta_t0_at_tc / (1.0 - std::exp(-t_c / t_rise));
    double sse = 0.0;
    for (std::size_t i = 0; i < i0; ++i) {
      const double r = (tr.temp[i] - t_b) - scale * (1.0 - std::exp(-tr.t[i] / t_rise));
      sse += r * r;
    }
    return sse;
  };
  const double best = golden_section(sse_for, std::log(t_c / 100.0), std::log(10.0 * t_c),
                                     iterations);
  return sse_for(best);
}

}  // namespace detail

struct SegmentationOptions {
  int coarse_grid = 200;  // candidate crossings across the admissible window
  int refine_grid = 60;   // second pass around the coarse minimum
  int min_early_samples = 4;
  int min_tail_samples = 8;
  int fit_iterations = 60;  // golden-section budget per candidate
};

// Crossing time between the equilibration regime and the exponential decay:
// the candidate where a rise model before t_c plus a tail model after t_c
// attains the best total fit.
inline double segment_regimes(const TimeTrace& trace, const ExperimentConfig& config,
                              const SegmentationOptions& opts = {}) {
  const detail::PreparedTrace tr = detail::prepare_trace(trace, config);
  const std::size_t n = tr.t.size();
  if (std::size_t(opts.min_early_samples + opts.min_tail_samples) >= n) {
    throw ValidationError("segment_regimes: trace too short for the requested margins");
  }
  const double t_b = config.substrate_temperature;
  const double lo = tr.t[opts.min_early_samples];
  const double hi = tr.t[n - opts.min_tail_samples];
  if (!(hi > lo)) throw NumericalError("segment_regimes: regimes not separable (window empty)");

  auto total_sse = [&](double t_c) {
    const std::size_t i0 =
        std::lower_bound(tr.t.begin(), tr.t.end(), t_c) - tr.t.begin();
    const detail::TailFitRaw tail = detail::fit_tail_raw(tr, i0, t_c, t_b, opts.fit_iterations);
    const double early =
        detail::fit_early_sse(tr, i0, t_c, t_b, tail.delta_t0, opts.fit_iterations);
    return tail.sse + early;
  };

  int best_i = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opts.coarse_grid; ++i) {
    const double t_c = lo + (hi - lo) * double(i) / double(opts.coarse_grid - 1);
    const double sse = total_sse(t_c);
    if (sse < best_sse) {
      best_sse = sse;
      best_i = i;
    }
  }
  if (best_i == 0 || best_i == opts.coarse_grid - 1) {
    throw NumericalError("segment_regimes: regimes not separable (no interior crossing)");
  }
  const double step = (hi - lo) / double(opts.coarse_grid - 1);
  const double coarse_best = lo + step * best_i;
  double best_tc = coarse_best;
  best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opts.refine_grid; ++i) {
    const double t_c =
        coarse_best - step + 2.0 * step * double(i) / double(opts.refine_grid - 1);
    const double sse = total_sse(t_c);
    if (sse < best_sse) {
      best_sse = sse;
      best_tc = t_c;
    }
  }
  return best_tc;
}

struct FourierTailFit {
  double conductance;   // W m^-2 K^-1, theta C / tau
  double tau;           // s
  double delta_t0;      // K, tail amplitude at the crossing
  double fit_residual;  // rms residual / |delta_t0|, dimensionless
};

// Lumped-capacitance tail fit T(t) = T_B + dT0 exp(-(t - t_c)/tau); the film
// is a single node of areal heat capacity theta*C, so G = theta C / tau.
inline FourierTailFit fit_fourier_tail(const TimeTrace& trace, double t_c,
                                       const ExperimentConfig& config) {
  const detail::PreparedTrace tr = detail::prepare_trace(trace, config);
  const std::size_t i0 = std::lower_bound(tr.t.begin(), tr.t.end(), t_c) - tr.t.begin();
  if (tr.t.size() - i0 < 8) {
    throw ValidationError("fit_fourier_tail: fewer than 8 samples past the crossing");
  }
  const detail::TailFitRaw raw =
      detail::fit_tail_raw(tr, i0, t_c, config.substrate_temperature, 240);
  if (raw.at_bound || !(std::abs(raw.delta_t0) > 0)) {
    throw NumericalError("fit_fourier_tail: tail shows no resolvable exponential decay");
  }
  FourierTailFit fit;
  fit.tau = raw.tau;
  fit.delta_t0 = raw.delta_t0;
  fit.conductance = config.film_thickness * config.heat_capacity / raw.tau;
  fit.fit_residual =
      std::sqrt(raw.sse / double(tr.t.size() - i0)) / std::max(std::abs(raw.delta_t0), 1e-300);
  return fit;
}

struct DiscordRateReport {
  double crossing_time;     // s (NaN when computed straight from a flux)
  double t_a_at_crossing;   // K
  double flux;              // W m^-2
  double rate_nats;         // nats m^-2 s^-1
  double rate_bits;         // bits m^-2 s^-1
  double fit_residual;      // dimensionless (NaN when computed from a flux)
  std::string note;
};

// Commonly quoted reference figure for the aluminum-sapphire interface; the
// printed units accompanying it are internally inconsistent, so reports
// compare against it instead of forcing agreement.
inline constexpr double reference_rate_bits = 4.28e24;

namespace detail {

inline DiscordRateReport rate_from_flux_at(double flux, double t_a, double t_b, double boltzmann) {
  if (!(t_a > t_b)) {
    throw ValidationError("discord_rate: film temperature " + std::to_string(t_a) +
                          " K does not exceed substrate temperature " + std::to_string(t_b) +
                          " K (no forward flow)");
  }
  DiscordRateReport report;
  report.crossing_time = std::numeric_limits<double>::quiet_NaN();
  report.fit_residual = std::numeric_limits<double>::quiet_NaN();
  report.t_a_at_crossing = t_a;
  report.flux = flux;
  report.rate_nats = flux * (1.0 / (boltzmann * t_b) - 1.0 / (boltzmann * t_a));
  report.rate_bits = report.rate_nats * nats_to_bits;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "computed rate is %.3g times the commonly quoted reference %.3g bits m^-2 s^-1; "
                "the reference's printed units are internally inconsistent, so this report keeps "
                "its own unit-checked arithmetic",
                report.rate_bits / reference_rate_bits, reference_rate_bits);
  report.note = buf;
  return report;
}

}  // namespace detail

// Full pipeline: segment, fit the tail, evaluate the crossing-point flux
// q = theta C |dT/dt| = G (T_A - T_B), and convert it to a discord
// production rate q (1/kT_B - 1/kT_A) per unit area.
inline DiscordRateReport discord_rate(const TimeTrace& trace, const ExperimentConfig& config,
                                      const SegmentationOptions& opts = {}) {
  const double t_c = segment_regimes(trace, config, opts);
  const FourierTailFit fit = fit_fourier_tail(trace, t_c, config);
  const double t_b = config.substrate_temperature;
  const double t_a = t_b + fit.delta_t0;
  const double flux = config.film_thickness * config.heat_capacity * fit.delta_t0 / fit.tau;
  DiscordRateReport report = detail::rate_from_flux_at(flux, t_a, t_b, config.boltzmann);
  report.crossing_time = t_c;
  report.fit_residual = fit.fit_residual;
  return report;
}

enum class FluxKind { flux, conductance };

// Direct arithmetic from a measured flux (W m^-2) or interface conductance
// (W m^-2 K^-1, multiplied by T_A - T_B) without a trace.
inline DiscordRateReport discord_rate_from_flux(double value, FluxKind kind, double t_a,
                                                double t_b, double boltzmann = boltzmann_si) {
  const double flux = kind == FluxKind::flux ? value : value * (t_a - t_b);
  return detail::rate_from_flux_at(flux, t_a, t_b, boltzmann);
}

// Fitted tail curve sampled at the trace times past the crossing.
inline std::vector<TraceSample> fitted_tail_curve(const TimeTrace& trace, double t_c,
                                                  const FourierTailFit& fit,
                                                  const ExperimentConfig& config) {
  const detail::PreparedTrace tr = detail::prepare_trace(trace, config);
  std::vector<TraceSample> out;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < t_c) continue;
    out.push_back({tr.t[i], config.substrate_temperature +
                                fit.delta_t0 * std::exp(-(tr.t[i] - t_c) / fit.tau)});
  }
  return out;
}

}  // namespace discordlab
