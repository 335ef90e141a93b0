#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpdr/fit.hpp"
#include "cpdr/simulation.hpp"
#include "cpdr/types.hpp"

namespace cpdr {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  Matrix data;  // numeric body, one row per record
};

namespace detail {

// Splits CSV text into records of fields, honoring quoted fields with embedded
// commas, doubled quotes, and newlines.
inline std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  const auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field += c;
    }
  }
  if (in_quotes) throw CsvError("malformed CSV: unterminated quoted field");
  if (!field.empty() || !record.empty()) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_record();
  }
  if (!any) throw CsvError("malformed CSV: empty file");
  return records;
}

inline bool parse_double(const std::string& s, double& out) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
  if (a == b) return false;
  const char* first = s.data() + a;
  const char* last = s.data() + b;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

// Reads a numeric CSV with a header row. Errors name the offending file
// position: one-based row numbers count the header as row 1.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open input file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto records = detail::parse_csv_records(buf.str());
  if (records.size() < 2) throw CsvError("malformed CSV: need a header row and at least one data row");

  CsvTable table;
  table.header = records.front();
  const std::size_t w = table.header.size();
  if (w == 0) throw CsvError("malformed CSV: empty header");
  table.data.resize(static_cast<Eigen::Index>(records.size() - 1), static_cast<Eigen::Index>(w));
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != w)
      throw CsvError("malformed CSV: row " + std::to_string(r + 1) + " has " +
                     std::to_string(records[r].size()) + " fields, expected " + std::to_string(w));
    for (std::size_t c = 0; c < w; ++c) {
      double v = 0.0;
      if (!detail::parse_double(records[r][c], v))
        throw CsvError("malformed CSV: non-numeric value at row " + std::to_string(r + 1) +
                       ", column " + std::to_string(c + 1) + " (\"" + table.header[c] + "\")");
      table.data(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return table;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

namespace detail {
inline std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}
}  // namespace detail

inline std::string df_label(int df) {
  return df == df_infinite ? "inf" : std::to_string(df);
}

// Mean-distance layout: model,family,df,n,method,reps,mean_delta,se_delta.
// Dimension-selection layout: model,n,method,dhat_accuracy.
inline std::string benchmark_csv(const BenchmarkTable& table) {
  std::string out;
  if (table.d_mode == DimensionMode::fixed_d0) {
    out = "model,family,df,n,method,reps,mean_delta,se_delta\n";
    for (const auto& row : table.rows) {
      out += model_name(row.spec.model);
      out += ',';
      out += family_name(row.spec.family);
      out += ',';
      out += df_label(row.spec.df);
      out += ',';
      out += std::to_string(row.spec.n);
      out += ',';
      out += method_name(row.method);
      out += ',';
      out += std::to_string(row.reps);
      out += ',';
      out += detail::fmt(row.mean_delta);
      out += ',';
      out += detail::fmt(row.se_delta);
      out += '\n';
    }
  } else {
    out = "model,n,method,dhat_accuracy\n";
    for (const auto& row : table.rows) {
      out += model_name(row.spec.model);
      out += ',';
      out += std::to_string(row.spec.n);
      out += ',';
      out += method_name(row.method);
      out += ',';
      out += detail::fmt(row.dhat_accuracy, "%.4f");
      out += '\n';
    }
  }
  return out;
}

// Fixed-width console rendering of a benchmark table.
inline std::string benchmark_summary(const BenchmarkTable& table) {
  char line[160];
  std::string out;
  if (table.d_mode == DimensionMode::fixed_d0) {
    std::snprintf(line, sizeof line, "%-6s %-14s %-4s %6s %-8s %5s %12s %10s\n", "model",
                  "family", "df", "n", "method", "reps", "mean_delta", "se_delta");
    out += line;
    for (const auto& row : table.rows) {
      std::snprintf(line, sizeof line, "%-6s %-14s %-4s %6d %-8s %5d %12.4f %10.4f\n",
                    model_name(row.spec.model), family_name(row.spec.family),
                    df_label(row.spec.df).c_str(), row.spec.n, method_name(row.method), row.reps,
                    row.mean_delta, row.se_delta);
      out += line;
    }
  } else {
    std::snprintf(line, sizeof line, "%-6s %6s %-8s %14s\n", "model", "n", "method",
                  "dhat_accuracy");
    out += line;
    for (const auto& row : table.rows) {
      std::snprintf(line, sizeof line, "%-6s %6d %-8s %14.4f\n", model_name(row.spec.model),
                    row.spec.n, method_name(row.method), row.dhat_accuracy);
      out += line;
    }
  }
  return out;
}

// Per-sample score export: response first, then one column per direction.
inline std::string indices_csv(const Vector& y, const Matrix& indices,
                               const std::string& response_name) {
  std::string out = response_name.empty() ? "y" : response_name;
  for (Eigen::Index j = 0; j < indices.cols(); ++j) out += ",eta" + std::to_string(j + 1);
  out += '\n';
  for (Eigen::Index i = 0; i < indices.rows(); ++i) {
    out += detail::fmt(y(i), "%.12g");
    for (Eigen::Index j = 0; j < indices.cols(); ++j) {
      out += ',';
      out += detail::fmt(indices(i, j), "%.12g");
    }
    out += '\n';
  }
  return out;
}

namespace detail {

inline nlohmann::json to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Vector vector_from_json(const nlohmann::json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

inline Matrix matrix_from_json(const nlohmann::json& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  return m;
}

}  // namespace detail

inline constexpr const char* fit_report_schema = "fit-report/1";

inline nlohmann::json fit_report_to_json(const FitResult& fit) {
  nlohmann::json j;
  j["schema"] = fit_report_schema;
  j["method"] = method_name(fit.method);
  j["n"] = fit.n;
  j["p"] = fit.p;
  j["K"] = fit.K;
  j["d_selected"] = fit.d_selected;
  j["response"] = fit.response_name;
  j["contour"] = fit.contour;
  j["eigenvalues"] = detail::to_json(fit.eigenvalues);
  j["basis_proj"] = detail::to_json(fit.basis_proj);
  j["basis_x"] = detail::to_json(fit.basis_x);
  j["indices"] = detail::to_json(fit.indices);
  j["mu"] = detail::to_json(fit.mu);
  j["sigma_inv_sqrt"] = detail::to_json(fit.sigma_inv_sqrt);
  j["column_scale"] = detail::to_json(fit.column_scale);
  j["scatter"] = {{"iterations", fit.scatter_iterations}, {"residual", fit.scatter_residual}};
  return j;
}

inline FitResult fit_report_from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j["schema"].get<std::string>() != fit_report_schema)
    throw std::runtime_error("unrecognized report schema");
  FitResult fit;
  const auto m = parse_method(j["method"].get<std::string>());
  if (!m) throw std::runtime_error("unrecognized method in report");
  fit.method = *m;
  fit.n = j["n"].get<int>();
  fit.p = j["p"].get<int>();
  fit.K = j["K"].get<int>();
  fit.d_selected = j["d_selected"].get<int>();
  fit.response_name = j["response"].get<std::string>();
  fit.contour = j["contour"].get<bool>();
  fit.eigenvalues = detail::vector_from_json(j["eigenvalues"]);
  fit.basis_proj = detail::matrix_from_json(j["basis_proj"]);
  fit.basis_x = detail::matrix_from_json(j["basis_x"]);
  fit.indices = detail::matrix_from_json(j["indices"]);
  fit.mu = detail::vector_from_json(j["mu"]);
  fit.sigma_inv_sqrt = detail::matrix_from_json(j["sigma_inv_sqrt"]);
  fit.column_scale = detail::vector_from_json(j["column_scale"]);
  fit.scatter_iterations = j["scatter"]["iterations"].get<int>();
  fit.scatter_residual = j["scatter"]["residual"].get<double>();
  return fit;
}

inline void save_fit_report(const std::string& path, const FitResult& fit) {
  write_text_file(path, fit_report_to_json(fit).dump(2) + "\n");
}

inline FitResult load_fit_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open report file: " + path);
  nlohmann::json j;
  in >> j;
  return fit_report_from_json(j);
}

}  // namespace cpdr
