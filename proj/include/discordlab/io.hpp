// Serialization boundary: JSON encodings for reports and operators, CSV
// writers, minimal SVG line charts, and a small structural schema checker
// for the emitted JSON documents.
#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "discordlab/correlations.hpp"
#include "discordlab/dynamics.hpp"
#include "discordlab/experiment.hpp"
#include "discordlab/qmat.hpp"
#include "discordlab/states.hpp"

namespace discordlab {

using Json = nlohmann::json;

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError("JSON: complex entries must be [re, im] pairs");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

// Row-major matrix with subsystem dims: {"dims": [dA, dB], "entries": [[re, im], ...]}.
inline Json matrix_to_json(const Matrix& m, int dim_a, int dim_b) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(complex_to_json(m(r, c)));
  }
  return Json{{"dims", {dim_a, dim_b}}, {"entries", entries}};
}

struct MatrixWithDims {
  Matrix mat;
  int dim_a;
  int dim_b;
};

inline MatrixWithDims matrix_from_json(const Json& j) {
  if (!j.contains("dims") || !j.contains("entries")) {
    throw ValidationError("JSON matrix: missing 'dims' or 'entries'");
  }
  const auto& dims = j["dims"];
  if (!dims.is_array() || dims.size() != 2) {
    throw ValidationError("JSON matrix: 'dims' must be [dA, dB]");
  }
  const int da = dims[0].get<int>();
  const int db = dims[1].get<int>();
  if (da < 1 || db < 1 || da * db > max_dim) {
    throw ValidationError("JSON matrix: dims out of range");
  }
  const int d = da * db;
  const auto& entries = j["entries"];
  if (!entries.is_array() || int(entries.size()) != d * d) {
    throw ValidationError("JSON matrix: expected " + std::to_string(d * d) + " entries, got " +
                          std::to_string(entries.size()));
  }
  Matrix m(d, d);
  int idx = 0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = complex_from_json(entries[idx++]);
  }
  return {std::move(m), da, db};
}

inline DensityMatrix state_from_json(const Json& j) {
  MatrixWithDims m = matrix_from_json(j);
  return DensityMatrix(std::move(m.mat), m.dim_a, m.dim_b);
}

inline Json state_to_json(const DensityMatrix& rho) {
  return matrix_to_json(rho.mat(), rho.dim_a(), rho.dim_b());
}

// {"dims": [dA, dB], "h_a": [...], "h_b": [...], "h_int": [...]} with each
// operator given as a row-major [re, im] entry list.
inline BipartiteHamiltonian hamiltonian_from_json(const Json& j) {
  if (!j.contains("dims") || !j.contains("h_a") || !j.contains("h_b") || !j.contains("h_int")) {
    throw ValidationError("JSON Hamiltonian: need 'dims', 'h_a', 'h_b', 'h_int'");
  }
  const int da = j["dims"][0].get<int>();
  const int db = j["dims"][1].get<int>();
  auto read_square = [](const Json& entries, int d, const std::string& who) {
    if (!entries.is_array() || int(entries.size()) != d * d) {
      throw ValidationError("JSON Hamiltonian: '" + who + "' must have " + std::to_string(d * d) +
                            " entries");
    }
    Matrix m(d, d);
    int idx = 0;
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) m(r, c) = complex_from_json(entries[idx++]);
    }
    return m;
  };
  return BipartiteHamiltonian(HermitianOperator(read_square(j["h_a"], da, "h_a"), "H_A"),
                              HermitianOperator(read_square(j["h_b"], db, "h_b"), "H_B"),
                              HermitianOperator(read_square(j["h_int"], da * db, "h_int"), "H_int"));
}

inline Json hamiltonian_to_json(const BipartiteHamiltonian& h) {
  auto entries = [](const Matrix& m) {
    Json arr = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(complex_to_json(m(r, c)));
    }
    return arr;
  };
  return Json{{"dims", {h.dim_a(), h.dim_b()}},
              {"h_a", entries(h.h_a.mat)},
              {"h_b", entries(h.h_b.mat)},
              {"h_int", entries(h.h_int.mat)}};
}

inline Json basis_to_json(const ProjectiveMeasurement& m) {
  Json arr = Json::array();
  for (const Vector& v : m.basis) {
    Json vec = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) vec.push_back(complex_to_json(v(i)));
    arr.push_back(vec);
  }
  return arr;
}

inline Json discord_report_to_json(const DiscordReport& r) {
  return Json{{"mutual_info_nats", r.mutual_info},
              {"measured_mutual_info_nats", r.measured_mutual_info},
              {"discord_nats", r.discord},
              {"discord_bits", r.discord * nats_to_bits},
              {"basis", basis_to_json(r.basis)},
              {"kind", to_string(r.kind)},
              {"direction", to_string(r.direction)},
              {"converged", r.converged}};
}

inline Json discord_rate_report_to_json(const DiscordRateReport& r) {
  return Json{{"crossing_time", r.crossing_time},
              {"t_a_at_crossing", r.t_a_at_crossing},
              {"flux", r.flux},
              {"rate_nats", r.rate_nats},
              {"rate_bits", r.rate_bits},
              {"fit_residual", r.fit_residual},
              {"note", r.note}};
}

inline Json theorem_report_to_json(const TheoremReport& r) {
  Json j{{"verdict", to_string(r.verdict)},
         {"max_discord_a2b_nats", r.max_discord_a_to_b},
         {"max_discord_b2a_nats", r.max_discord_b_to_a},
         {"discord_threshold_nats", r.discord_threshold},
         {"note", r.note}};
  j["first_generation_time"] = r.first_generation_time;
  j["max_reconstruction_error"] = r.max_reconstruction_error;
  return j;
}

inline Json flow_ratio_to_json(const FlowRatioResult& r) {
  return Json{{"extrapolated_ratio", r.extrapolated_ratio},
              {"theoretical_ratio", r.theoretical_ratio},
              {"relative_error", r.relative_error},
              {"dt_values", r.dt_values},
              {"ratios", r.ratios}};
}

inline Json sweep_summary_to_json(const SweepResult& s) {
  Json j{{"sin2_amplitude", s.sin2_amplitude},
         {"sin2_relative_residual", s.sin2_residual},
         {"argmax_rate_gamma_t", s.argmax_rate_gamma_t},
         {"points", s.points.size()},
         {"optimized_included", s.optimized_included}};
  if (s.optimized_included) j["max_diag_opt_gap_nats"] = s.max_diag_opt_gap;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << content;
}

inline void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// One CSV row per value list; all numbers printed round-trip exact.
inline std::string csv_table(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << buf << (i + 1 < row.size() ? "," : "\n");
    }
  }
  return out.str();
}

// ---- SVG line charts (polyline + axes, no plotting dependency) ----

struct SvgSeries {
  std::string label;
  std::string color = "#1f6fb2";
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace detail

inline std::string line_chart_svg(const std::vector<SvgSeries>& series, const std::string& title,
                                  const std::string& x_label, const std::string& y_label,
                                  int width = 720, int height = 480) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
  auto py = [&](double y) { return mt + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << detail::xml_escape(title) << "</text>\n";
  // axes
  svg << "  <line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    svg << "  <line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx) << "\" y2=\""
        << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::format_tick(fx) << "</text>\n";
    svg << "  <line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
        << py(fy) << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << detail::format_tick(fy) << "</text>\n";
  }
  svg << "  <text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << detail::xml_escape(x_label)
      << "</text>\n";
  svg << "  <text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << detail::xml_escape(y_label)
      << "</text>\n";
  int legend_y = int(mt) + 6;
  for (const SvgSeries& s : series) {
    svg << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    svg << "\"/>\n";
    svg << "  <text x=\"" << ml + pw - 6 << "\" y=\"" << legend_y
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color << "\">"
        << detail::xml_escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---- structural schema check (required keys + primitive types) ----

// Supports the subset used by the shipped schemas: "type" (string or list),
// "required", "properties", "items". Returns true when `value` conforms.
inline bool matches_schema(const Json& value, const Json& schema, std::string* error = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  if (schema.contains("type")) {
    auto type_ok = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "number") return value.is_number();
      if (t == "integer") return value.is_number_integer();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      return false;
    };
    const Json& ty = schema["type"];
    bool ok = false;
    if (ty.is_string()) {
      ok = type_ok(ty.get<std::string>());
    } else if (ty.is_array()) {
      for (const auto& t : ty) ok = ok || type_ok(t.get<std::string>());
    }
    if (!ok) return fail("type mismatch: value does not match schema type " + ty.dump());
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>())) {
        return fail("missing required key '" + key.get<std::string>() + "'");
      }
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (value.contains(key) && !matches_schema(value.at(key), sub, error)) {
        if (error) *error = "property '" + key + "': " + *error;
        return false;
      }
    }
  }
  if (schema.contains("items") && value.is_array()) {
    for (const auto& item : value) {
      if (!matches_schema(item, schema["items"], error)) return false;
    }
  }
  return true;
}

}  // namespace discordlab
