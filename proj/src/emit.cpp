#include "qdl/emit.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qdl {

using ojson = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kDiagnostics = {"residual",  "trace_error",        "min_eigenvalue", "n_max1",
                                               "n_max2",    "converged",          "convergence_change",
                                               "status",    "message",            "warnings"};

std::string axis_name(const RunConfig& cfg) { return cfg.sweep ? to_string(cfg.sweep->axis) : "point"; }

double rounded(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Failed rows carry no observables.
std::optional<double> cell(const ResultRow& r, const std::string& label) {
  if (r.status != RowStatus::ok) return std::nullopt;
  return r.value(label);
}

std::string joined_warnings(const ResultRow& r) {
  std::string w;
  for (const auto& s : r.warnings) w += (w.empty() ? "" : "; ") + s;
  return w;
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("format must be 'csv' or 'json', got '" + name + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<std::string> result_columns(const RunConfig& cfg) {
  std::vector<std::string> cols{axis_name(cfg)};
  const auto& data = cfg.outputs.empty() ? output_labels() : cfg.outputs;
  cols.insert(cols.end(), data.begin(), data.end());
  cols.insert(cols.end(), kDiagnostics.begin(), kDiagnostics.end());
  return cols;
}

std::string format_results(const std::vector<ResultRow>& rows, const RunConfig& cfg, OutputFormat format) {
  if (rows.empty()) throw InvalidArgument("no result rows to emit");
  const std::vector<std::string> cols = result_columns(cfg);
  const std::vector<std::string> data(cols.begin() + 1, cols.end() - long(kDiagnostics.size()));

  if (format == OutputFormat::csv) {
    std::ostringstream os;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
      os << format_number(r.axis_value);
      for (const auto& c : data) {
        const auto v = cell(r, c);
        os << ',' << (v ? format_number(*v) : "NA");
      }
      os << ',' << format_number(r.residual) << ',' << format_number(r.trace_error) << ','
         << format_number(r.min_eigenvalue) << ',' << r.n_max1 << ',' << r.n_max2 << ','
         << (r.converged ? "true" : "false") << ',' << format_number(r.convergence_change) << ','
         << (r.status == RowStatus::ok ? "ok" : "failed") << ',' << csv_field(r.message) << ','
         << csv_field(joined_warnings(r)) << '\n';
    }
    return os.str();
  }

  ojson doc;
  doc["config"] = ojson::parse(cfg.to_json().dump());
  doc["config"].erase("workers");
  doc["config"].erase("output_path");
  doc["axis"] = axis_name(cfg);
  doc["columns"] = cols;
  ojson out_rows = ojson::array();
  for (const auto& r : rows) {
    ojson row;
    row[cols[0]] = rounded(r.axis_value);
    for (const auto& c : data) {
      const auto v = cell(r, c);
      row[c] = v ? ojson(rounded(*v)) : ojson(nullptr);
    }
    row["residual"] = rounded(r.residual);
    row["trace_error"] = rounded(r.trace_error);
    row["min_eigenvalue"] = rounded(r.min_eigenvalue);
    row["n_max1"] = r.n_max1;
    row["n_max2"] = r.n_max2;
    row["converged"] = r.converged;
    row["convergence_change"] = rounded(r.convergence_change);
    row["status"] = r.status == RowStatus::ok ? "ok" : "failed";
    row["message"] = r.message;
    row["warnings"] = r.warnings;
    out_rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(out_rows);
  return doc.dump(2) + "\n";
}

std::vector<ResultRow> parse_results_json(const std::string& text) {
  const ojson doc = ojson::parse(text);
  const std::string axis = doc.at("axis").get<std::string>();
  std::vector<ResultRow> rows;
  for (const auto& j : doc.at("rows")) {
    ResultRow r;
    r.axis_value = j.at(axis).get<double>();
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<double>();
    };
    auto num = [&](const char* key, double fallback) { return opt(key).value_or(fallback); };
    r.pop_g = num("pop_g", 0);
    r.pop_x = num("pop_x", 0);
    r.pop_y = num("pop_y", 0);
    r.pop_u = num("pop_u", 0);
    r.n1 = num("n1", 0);
    r.n2 = num("n2", 0);
    r.F1 = opt("F1");
    r.F2 = opt("F2");
    r.g2_1 = opt("g2_1");
    r.g2_2 = opt("g2_2");
    r.g2_12 = opt("g2_12");
    r.single1_net = opt("single1_net");
    r.single2_net = opt("single2_net");
    r.twophoton_net = opt("twophoton_net");
    r.variance_sum = num("variance_sum", 0);
    r.variance_min = num("variance_min", 0);
    r.residual = num("residual", 0);
    r.trace_error = num("trace_error", 0);
    r.min_eigenvalue = num("min_eigenvalue", 0);
    r.n_max1 = j.at("n_max1").get<int>();
    r.n_max2 = j.at("n_max2").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.convergence_change = num("convergence_change", 0);
    r.status = j.at("status").get<std::string>() == "ok" ? RowStatus::ok : RowStatus::failed;
    r.message = j.at("message").get<std::string>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_kernel_table(const std::vector<KernelTableRow>& table, const PhononKernels& kernels,
                                OutputFormat format) {
  if (format == OutputFormat::csv) {
    std::ostringstream os;
    os << "omega,K_g_re,K_g_im,K_u_re,K_u_im\n";
    for (const auto& r : table) {
      os << format_number(r.omega) << ',' << format_number(r.k_g.real()) << ',' << format_number(r.k_g.imag())
         << ',' << format_number(r.k_u.real()) << ',' << format_number(r.k_u.imag()) << '\n';
    }
    return os.str();
  }
  const PhononBathParams& b = kernels.params();
  ojson doc;
  doc["bath"] = {{"temperature", rounded(b.temperature)},
                 {"alpha_p", rounded(b.alpha_p)},
                 {"omega_b", rounded(b.omega_b)},
                 {"g1_absolute", rounded(b.g1_absolute)}};
  doc["displacement_average"] = rounded(kernels.displacement_average());
  doc["tau_max"] = rounded(kernels.tau_max());
  ojson rows = ojson::array();
  for (const auto& r : table) {
    rows.push_back({{"omega", rounded(r.omega)},
                    {"K_g_re", rounded(r.k_g.real())},
                    {"K_g_im", rounded(r.k_g.imag())},
                    {"K_u_re", rounded(r.k_u.real())},
                    {"K_u_im", rounded(r.k_u.imag())}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw Error("failed writing '" + path + "'");
}

void emit_results(const std::vector<ResultRow>& rows, const RunConfig& cfg, OutputFormat format,
                  const std::string& path) {
  write_output(format_results(rows, cfg, format), path);
}

}  // namespace qdl
