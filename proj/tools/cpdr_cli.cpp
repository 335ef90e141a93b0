// Command-line driver: fit a dimension-reduction model on CSV data, reproduce
// the simulation benchmarks, or project new data through a saved fit.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpdr/cpdr.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;      // bad flags, malformed input, schema mismatches
constexpr int exit_numerical = 3;  // singular scatter, degenerate samples, ...

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ResponseSplit {
  cpdr::Matrix X;
  cpdr::Vector y;
  std::vector<std::string> predictor_names;
};

ResponseSplit split_response(const cpdr::CsvTable& table, const std::string& response) {
  Eigen::Index rcol = -1;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == response) rcol = static_cast<Eigen::Index>(c);
  if (rcol < 0) throw cpdr::CsvError("response column not found: " + response);
  if (table.header.size() < 2) throw cpdr::CsvError("no predictor columns in input");
  ResponseSplit out;
  out.y = table.data.col(rcol);
  out.X.resize(table.data.rows(), table.data.cols() - 1);
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < table.data.cols(); ++c) {
    if (c == rcol) continue;
    out.X.col(k) = table.data.col(c);
    out.predictor_names.push_back(table.header[static_cast<std::size_t>(c)]);
    ++k;
  }
  return out;
}

int run_fit(const std::string& input, const std::string& response, const std::string& method_s,
            int slices, const std::string& dim_s, int dmax, bool standardize,
            const std::string& location_s, double tol, int max_iter, const std::string& out_path) {
  const auto method = cpdr::parse_method(method_s);
  if (!method) {
    std::cerr << "unknown method: " << method_s << "\n";
    return exit_usage;
  }
  cpdr::FitOptions opts;
  opts.method = *method;
  opts.slices = slices;
  opts.dmax = dmax;
  opts.standardize = standardize;
  opts.scatter.tol = tol;
  opts.scatter.max_iter = max_iter;
  if (location_s == "fixed-median") {
    opts.scatter.location_mode = cpdr::LocationMode::fixed_median;
  } else if (location_s == "iterate") {
    opts.scatter.location_mode = cpdr::LocationMode::iterate;
  } else {
    std::cerr << "unknown location mode: " << location_s << "\n";
    return exit_usage;
  }
  if (dim_s == "auto") {
    opts.dim = 0;
  } else {
    try {
      opts.dim = std::stoi(dim_s);
    } catch (const std::exception&) {
      std::cerr << "invalid --dim value: " << dim_s << "\n";
      return exit_usage;
    }
    if (opts.dim < 1) {
      std::cerr << "invalid --dim value: " << dim_s << "\n";
      return exit_usage;
    }
  }

  try {
    const cpdr::CsvTable table = cpdr::read_csv(input);
    ResponseSplit data = split_response(table, response);
    cpdr::FitResult fit = cpdr::fit(data.X, data.y, opts);
    fit.response_name = response;
    cpdr::save_fit_report(out_path, fit);
    std::printf("method %s: n=%d p=%d K=%d d=%d\n", cpdr::method_name(fit.method), fit.n, fit.p,
                fit.K, fit.d_selected);
    std::printf("leading eigenvalues:");
    for (int j = 0; j < std::min(5, fit.p); ++j) std::printf(" %.6g", fit.eigenvalues(j));
    std::printf("\nreport written to %s\n", out_path.c_str());
    return exit_ok;
  } catch (const cpdr::CsvError& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return exit_numerical;
  }
}

int run_simulate(const std::string& models_s, const std::string& dfs_s,
                 const std::string& families_s, const std::string& ns_s,
                 const std::string& methods_s, int reps, std::uint64_t seed, int p,
                 const std::string& dmode_s, int threads, const std::string& location_s,
                 const std::string& out_path) {
  std::vector<cpdr::Model> models;
  for (const auto& s : split_list(models_s)) {
    const auto m = cpdr::parse_model(s);
    if (!m) {
      std::cerr << "unknown model: " << s << "\n";
      return exit_usage;
    }
    models.push_back(*m);
  }
  std::vector<int> dfs;
  for (const auto& s : split_list(dfs_s)) {
    if (s == "inf" || s == "infinity") {
      dfs.push_back(cpdr::df_infinite);
    } else if (s == "1" || s == "3" || s == "5") {
      dfs.push_back(std::stoi(s));
    } else {
      std::cerr << "unknown df (expected 1, 3, 5, or inf): " << s << "\n";
      return exit_usage;
    }
  }
  std::vector<cpdr::Family> families;
  for (const auto& s : split_list(families_s)) {
    const auto f = cpdr::parse_family(s);
    if (!f) {
      std::cerr << "unknown family: " << s << "\n";
      return exit_usage;
    }
    families.push_back(*f);
  }
  std::vector<int> ns;
  for (const auto& s : split_list(ns_s)) {
    try {
      ns.push_back(std::stoi(s));
    } catch (const std::exception&) {
      std::cerr << "invalid sample size: " << s << "\n";
      return exit_usage;
    }
  }
  std::vector<cpdr::Method> methods;
  for (const auto& s : split_list(methods_s)) {
    const auto m = cpdr::parse_method(s);
    if (!m) {
      std::cerr << "unknown method: " << s << "\n";
      return exit_usage;
    }
    methods.push_back(*m);
  }
  cpdr::DimensionMode d_mode;
  if (dmode_s == "fixed") {
    d_mode = cpdr::DimensionMode::fixed_d0;
  } else if (dmode_s == "merc") {
    d_mode = cpdr::DimensionMode::merc;
  } else {
    std::cerr << "unknown dimension mode (expected fixed or merc): " << dmode_s << "\n";
    return exit_usage;
  }
  if (models.empty() || dfs.empty() || families.empty() || ns.empty() || methods.empty() ||
      reps < 1) {
    std::cerr << "empty benchmark grid\n";
    return exit_usage;
  }

  cpdr::ReplicationProtocol protocol;
  if (location_s == "fixed-median") {
    protocol.scatter.location_mode = cpdr::LocationMode::fixed_median;
  } else if (location_s == "iterate") {
    protocol.scatter.location_mode = cpdr::LocationMode::iterate;
  } else {
    std::cerr << "unknown location mode: " << location_s << "\n";
    return exit_usage;
  }

  std::vector<cpdr::BenchmarkCell> cells;
  for (const auto model : models)
    for (const auto family : families)
      for (const int df : dfs)
        for (const int n : ns)
          for (const auto method : methods) {
            cpdr::ModelSpec spec;
            spec.model = model;
            spec.family = family;
            spec.df = df;
            spec.n = n;
            spec.p = p;
            cells.push_back({spec, method, reps});
          }

  try {
    const cpdr::BenchmarkTable table = cpdr::run_benchmark(cells, seed, d_mode, threads, protocol);
    cpdr::write_text_file(out_path, cpdr::benchmark_csv(table));
    std::cout << cpdr::benchmark_summary(table);
    std::printf("table written to %s\n", out_path.c_str());
    return exit_ok;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return exit_numerical;
  }
}

int run_project(const std::string& input, const std::string& model_file,
                const std::string& out_path) {
  try {
    const cpdr::FitResult fit = cpdr::load_fit_report(model_file);
    const cpdr::CsvTable table = cpdr::read_csv(input);
    ResponseSplit data = split_response(table, fit.response_name);
    if (data.X.cols() != fit.p) {
      std::cerr << "dimension mismatch between model file and data\n";
      return exit_usage;
    }
    const cpdr::Matrix indices = cpdr::project_indices(fit, data.X);
    cpdr::write_text_file(out_path, cpdr::indices_csv(data.y, indices, fit.response_name));
    std::printf("projected %d rows onto %d direction(s); written to %s\n",
                static_cast<int>(indices.rows()), static_cast<int>(indices.cols()),
                out_path.c_str());
    return exit_ok;
  } catch (const cpdr::CsvError& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contour-projected and classical sliced inverse regression toolkit"};
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "estimate a dimension-reduction subspace from CSV data");
  std::string fit_input, fit_response, fit_out;
  std::string fit_method = "cp-dr", fit_dim = "auto", fit_location = "fixed-median";
  int fit_slices = 5, fit_dmax = 5, fit_max_iter = 500;
  double fit_tol = 1e-8;
  bool fit_standardize = false;
  fit_cmd->add_option("--input", fit_input, "input CSV with a header row")->required();
  fit_cmd->add_option("--response", fit_response, "name of the response column")->required();
  fit_cmd->add_option("--method", fit_method, "cp-sir|cp-save|cp-dr|sir|save|dr");
  fit_cmd->add_option("--slices", fit_slices, "requested slice count (default 5)");
  fit_cmd->add_option("--dim", fit_dim, "subspace dimension, or 'auto' for ratio-based selection");
  fit_cmd->add_option("--dmax", fit_dmax, "dimension search cap for --dim auto (default 5)");
  fit_cmd->add_flag("--standardize", fit_standardize,
                    "rescale columns to unit scatter diagonal before fitting");
  fit_cmd->add_option("--location", fit_location, "scatter location handling: fixed-median|iterate");
  fit_cmd->add_option("--tol", fit_tol, "scatter convergence threshold (default 1e-8)");
  fit_cmd->add_option("--max-iter", fit_max_iter, "scatter iteration cap (default 500)");
  fit_cmd->add_option("--out", fit_out, "output report path (JSON)")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run the replication benchmark grid");
  std::string sim_models = "I", sim_dfs = "inf", sim_families = "elliptical";
  std::string sim_ns = "400", sim_methods = "cp-dr", sim_dmode = "fixed";
  std::string sim_location = "iterate", sim_out;
  int sim_reps = 100, sim_p = 20, sim_threads = 0;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--models", sim_models, "comma list of I,II,III,IV,V");
  sim_cmd->add_option("--dfs", sim_dfs, "comma list of 1,3,5,inf");
  sim_cmd->add_option("--families", sim_families, "comma list of elliptical,asymmetric");
  sim_cmd->add_option("--n", sim_ns, "comma list of sample sizes");
  sim_cmd->add_option("--methods", sim_methods, "comma list of estimators");
  sim_cmd->add_option("--reps", sim_reps, "replications per cell (default 100)");
  sim_cmd->add_option("--seed", sim_seed, "base seed (default 1)");
  sim_cmd->add_option("--p", sim_p, "predictor dimension (default 20)");
  sim_cmd->add_option("--dmode", sim_dmode, "fixed (true dimension) or merc (selected)");
  sim_cmd->add_option("--threads", sim_threads, "worker threads (default: all cores)");
  sim_cmd->add_option("--location", sim_location,
                      "scatter location handling: fixed-median|iterate (default iterate)");
  sim_cmd->add_option("--out", sim_out, "output CSV path")->required();

  // project
  auto* proj_cmd = app.add_subcommand("project", "project data through a saved fit report");
  std::string proj_input, proj_model, proj_out;
  proj_cmd->add_option("--input", proj_input, "input CSV with a header row")->required();
  proj_cmd->add_option("--model-file", proj_model, "fit report JSON from 'fit'")->required();
  proj_cmd->add_option("--out", proj_out, "output indices CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  if (fit_cmd->parsed())
    return run_fit(fit_input, fit_response, fit_method, fit_slices, fit_dim, fit_dmax,
                   fit_standardize, fit_location, fit_tol, fit_max_iter, fit_out);
  if (sim_cmd->parsed())
    return run_simulate(sim_models, sim_dfs, sim_families, sim_ns, sim_methods, sim_reps, sim_seed,
                        sim_p, sim_dmode, sim_threads, sim_location, sim_out);
  if (proj_cmd->parsed()) return run_project(proj_input, proj_model, proj_out);
  return exit_usage;
}
