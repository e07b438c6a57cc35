#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "netembed/config.hpp"
#include "netembed/recovery.hpp"
#include "netembed/version.hpp"
#include "netembed/width.hpp"

namespace netembed {

struct RunReport {
  std::vector<std::string> artifacts;
};

namespace detail {

inline std::vector<std::pair<std::string, std::string>> csv_meta(
    const ExperimentConfig& cfg) {
  return {{"master_seed", format_u64(cfg.master_seed)},
          {"config_hash", config_hash(cfg)}};
}

inline void log_progress(const ExperimentConfig& cfg, const std::string& msg) {
  if (!cfg.quiet) std::cerr << "[netembed] " << msg << "\n";
}

inline std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline ManifoldModel build_model(const ExperimentConfig& cfg) {
  if (cfg.model_kind == ModelKind::UnionOfSubspaces)
    return make_union_of_subspaces(cfg.n, cfg.k, cfg.L, cfg.master_seed);
  return make_gmm_model(cfg.n, cfg.k, cfg.L, cfg.master_seed, cfg.centers);
}

// One replicate of the embedding experiment: fresh cloud and layer stack,
// distortion of the final output against the input cloud.
inline DistortionReport embedding_replicate(const ExperimentConfig& cfg,
                                            const ManifoldModel& model, int m,
                                            int replicate) {
  const PointCloud cloud = sample_points(
      model, cfg.points, rng::derive_seed(cfg.master_seed, rng::tag::kReplicate, replicate));
  std::vector<RandomLayer> stack;
  int in_dim = cfg.n;
  for (int d = 0; d < cfg.depth; ++d) {
    stack.push_back(make_layer(
        in_dim, m, cfg.activation_spec(),
        rng::derive_seed(cfg.master_seed, rng::tag::kTrialLayer,
                         static_cast<std::uint64_t>(replicate) * 1024 + d)));
    in_dim = m;
  }
  const StackResult forward = forward_stack(stack, cloud, cfg.renormalize);
  return distortion_report(cloud, forward.clouds.back().points, cfg.pre_metric,
                           cfg.post_metric);
}

inline std::vector<std::string> run_meanwidth(const ExperimentConfig& cfg) {
  const ManifoldModel model = build_model(cfg);
  const std::string path = out_path(cfg, "meanwidth.csv");
  CsvWriter csv(path,
                {"replicate", "n", "k", "L", "points", "probes", "value",
                 "std_error", "gmm_bound", "dudley_bound"},
                csv_meta(cfg));
  const double gmm_bound = mean_width_gmm_bound(cfg.k, cfg.L);
  const double dudley = dudley_bound(gmm_covering_fn(cfg.L, cfg.k));
  std::vector<MeanWidthEstimate> estimates(cfg.replicates);
  for (int r = 0; r < cfg.replicates; ++r) {
    const PointCloud cloud = sample_points(
        model, cfg.width_cloud,
        rng::derive_seed(cfg.master_seed, rng::tag::kReplicate, r));
    estimates[r] = estimate_mean_width(
        cloud, cfg.probes, rng::derive_seed(cfg.master_seed, rng::tag::kWidth, r),
        cfg.threads);
  }
  for (int r = 0; r < cfg.replicates; ++r) {
    csv.row({std::to_string(r), std::to_string(cfg.n), std::to_string(cfg.k),
             std::to_string(cfg.L), std::to_string(cfg.width_cloud),
             std::to_string(cfg.probes), format_double(estimates[r].value),
             format_double(estimates[r].std_error), format_double(gmm_bound),
             format_double(dudley)});
  }

  // bound evaluations in the generic {quantity, params, value, std_error} shape
  const std::string bounds_path = out_path(cfg, "bounds.csv");
  CsvWriter bounds(bounds_path, {"quantity", "params", "value", "std_error"},
                   csv_meta(cfg));
  const std::string kl = "k=" + std::to_string(cfg.k) + ";L=" + std::to_string(cfg.L);
  for (int r = 0; r < cfg.replicates; ++r)
    bounds.row({"mean_width_mc", kl + ";replicate=" + std::to_string(r),
                format_double(estimates[r].value),
                format_double(estimates[r].std_error)});
  bounds.row({"gmm_width_bound", kl + ";constant=1", format_double(gmm_bound), "0"});
  bounds.row({"dudley_integral", kl + ";constant=1", format_double(dudley), "0"});
  bounds.row({"sudakov_net_size",
              kl + ";eps=" + format_double(cfg.eps) + ";constant=" +
                  format_double(cfg.bound_constant),
              format_double(sudakov_net_size(
                  mean_width_gmm_bound(cfg.k, cfg.L, cfg.bound_constant), cfg.eps,
                  cfg.bound_constant)),
              "0"});
  return {path, bounds_path};
}

inline std::string run_embedding(const ExperimentConfig& cfg) {
  const ManifoldModel model = build_model(cfg);
  const std::string path = out_path(cfg, "embedding.csv");
  CsvWriter csv(path,
                {"replicate", "n", "m", "k", "L", "depth", "metric_pre",
                 "metric_post", "scale_constant", "max_residual",
                 "mean_residual", "spearman"},
                csv_meta(cfg));
  // one slot per (replicate, m); filled in parallel, written in order
  const std::size_t cells = static_cast<std::size_t>(cfg.replicates) * cfg.m_list.size();
  std::vector<DistortionReport> reports(cells);
  parallel_for(cells, cfg.threads, [&](std::size_t idx) {
    const int r = static_cast<int>(idx / cfg.m_list.size());
    const int mi = static_cast<int>(idx % cfg.m_list.size());
    reports[idx] = embedding_replicate(cfg, model, cfg.m_list[mi], r);
  });
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const int r = static_cast<int>(idx / cfg.m_list.size());
    const int m = cfg.m_list[idx % cfg.m_list.size()];
    const DistortionReport& rep = reports[idx];
    csv.row({std::to_string(r), std::to_string(cfg.n), std::to_string(m),
             std::to_string(cfg.k), std::to_string(cfg.L),
             std::to_string(cfg.depth), to_string(rep.pre_metric),
             to_string(rep.post_metric), format_double(rep.scale_constant),
             format_double(rep.max_residual), format_double(rep.mean_residual),
             format_double(rep.spearman)});
  }
  return path;
}

inline std::vector<std::string> run_recovery(const ExperimentConfig& cfg) {
  const ManifoldModel model = build_model(cfg);
  IterativeOptions opts;
  opts.max_iter = cfg.max_iter;
  opts.step = cfg.step;
  opts.tol = cfg.tol;
  const SweepResult sweep =
      recovery_error_sweep(model, cfg.master_seed, cfg.m_list, cfg.trials,
                           cfg.activation_spec(), opts, cfg.threads);

  const std::string rows_path = out_path(cfg, "recovery.csv");
  CsvWriter rows(rows_path,
                 {"m", "trial", "method", "residual", "error", "iterations"},
                 csv_meta(cfg));
  for (const SweepRow& row : sweep.rows)
    rows.row({std::to_string(row.m), std::to_string(row.trial),
              to_string(row.method), format_double(row.residual),
              format_double(row.error), std::to_string(row.iterations)});

  const std::string summary_path = out_path(cfg, "recovery_summary.csv");
  CsvWriter summary(summary_path,
                    {"method", "m", "median_error", "loglog_slope", "at_floor"},
                    csv_meta(cfg));
  for (const SweepMedian& med : sweep.medians) {
    const bool linear = med.method == RecoveryMethod::Linear;
    summary.row({to_string(med.method), std::to_string(med.m),
                 format_double(med.median_error),
                 format_double(linear ? sweep.slope_linear : sweep.slope_iterative),
                 (linear ? sweep.floor_linear : sweep.floor_iterative) ? "true"
                                                                       : "false"});
  }
  return {rows_path, summary_path};
}

inline std::string run_covering(const ExperimentConfig& cfg) {
  const ManifoldModel model = build_model(cfg);
  const int m = cfg.m_list.back();
  const std::string path = out_path(cfg, "covering.csv");
  CsvWriter csv(path,
                {"replicate", "m", "eps", "width_est", "net_size_post",
                 "net_size_pre", "bound_rhs", "pass"},
                csv_meta(cfg));
  struct Cell {
    double width = 0.0;
    std::vector<RecursionCheck> checks;
  };
  std::vector<Cell> cells(cfg.replicates);
  parallel_for(static_cast<std::size_t>(cfg.replicates), cfg.threads,
               [&](std::size_t r) {
                 const PointCloud cloud = sample_points(
                     model, cfg.points,
                     rng::derive_seed(cfg.master_seed, rng::tag::kReplicate, r));
                 const RandomLayer layer = make_layer(
                     cfg.n, m, cfg.activation_spec(),
                     rng::derive_seed(cfg.master_seed, rng::tag::kTrialLayer, r));
                 const Matrix post = apply_layer(layer, cloud.points);
                 cells[r].width =
                     estimate_mean_width(
                         cloud, cfg.probes,
                         rng::derive_seed(cfg.master_seed, rng::tag::kWidth, r), 1)
                         .value;
                 for (double eps : cfg.eps_list)
                   cells[r].checks.push_back(verify_covering_recursion(
                       cloud, post, eps, cells[r].width, m, cfg.slack));
               });
  for (int r = 0; r < cfg.replicates; ++r) {
    for (const RecursionCheck& check : cells[r].checks)
      csv.row({std::to_string(r), std::to_string(m), format_double(check.eps),
               format_double(cells[r].width), std::to_string(check.net_post),
               std::to_string(check.net_pre_shrunk),
               format_double(check.bound_rhs), check.pass ? "true" : "false"});
  }
  return path;
}

inline std::string run_samplesize(const ExperimentConfig& cfg) {
  const std::string path = out_path(cfg, "samplesize.csv");
  CsvWriter csv(path, {"k", "L", "eps", "constant", "width_bound", "net_size"},
                csv_meta(cfg));
  const double width = mean_width_gmm_bound(cfg.k, cfg.L, cfg.bound_constant);
  const double net = sudakov_net_size(width, cfg.eps, cfg.bound_constant);
  csv.row({std::to_string(cfg.k), std::to_string(cfg.L), format_double(cfg.eps),
           format_double(cfg.bound_constant), format_double(width),
           format_double(net)});
  return path;
}

}  // namespace detail

// Runs the configured experiment, writing CSV artifacts plus a run manifest
// into cfg.out_dir. Identical config and seed give byte-identical CSV bodies
// (the manifest records wall time and is excluded from that guarantee).
inline RunReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  if (!cfg.experiment)
    throw ConfigError("config field 'experiment.kind': not set");
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);

  RunReport report;
  const ExperimentKind kind = *cfg.experiment;
  const bool all = kind == ExperimentKind::FullSweep;
  if (all || kind == ExperimentKind::MeanWidth) {
    detail::log_progress(cfg, "meanwidth experiment");
    for (std::string& path : detail::run_meanwidth(cfg))
      report.artifacts.push_back(std::move(path));
  }
  if (all || kind == ExperimentKind::Embedding) {
    detail::log_progress(cfg, "embedding experiment");
    report.artifacts.push_back(detail::run_embedding(cfg));
  }
  if (all || kind == ExperimentKind::Recovery) {
    detail::log_progress(cfg, "recovery experiment");
    for (std::string& path : detail::run_recovery(cfg))
      report.artifacts.push_back(std::move(path));
  }
  if (all || kind == ExperimentKind::Covering) {
    detail::log_progress(cfg, "covering experiment");
    report.artifacts.push_back(detail::run_covering(cfg));
  }
  if (all || kind == ExperimentKind::SampleSize) {
    detail::log_progress(cfg, "samplesize experiment");
    report.artifacts.push_back(detail::run_samplesize(cfg));
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  const std::string manifest_path = detail::out_path(cfg, "manifest.txt");
  std::ofstream manifest(manifest_path, std::ios::binary);
  manifest << "netembed " << kVersion << "\n"
           << "config_hash " << config_hash(cfg) << "\n"
           << "wall_time_ms " << elapsed.count() << "\n"
           << "artifacts";
  for (const std::string& a : report.artifacts)
    manifest << " " << std::filesystem::path(a).filename().string();
  manifest << "\n\n" << canonical_config_text(cfg);
  report.artifacts.push_back(manifest_path);
  return report;
}

struct PlotdataResult {
  bool warning = false;
  std::string message;
};

// Projects a CSV onto a tidy (x, y[, group]) table; rows are copied verbatim
// so duplicates survive and numeric formatting is untouched.
inline PlotdataResult emit_plotdata(const std::string& csv_path,
                                    const std::string& x_field,
                                    const std::string& y_field,
                                    const std::string& group_field,
                                    const std::string& out_file) {
  const CsvTable table = read_csv(csv_path);
  auto require = [&](const std::string& name) {
    const int col = table.column_of(name);
    if (col < 0)
      throw std::invalid_argument("plotdata: field '" + name +
                                  "' not found; available fields: " +
                                  table.available_columns());
    return col;
  };
  const int xc = require(x_field);
  const int yc = require(y_field);
  const int gc = group_field.empty() ? -1 : require(group_field);

  std::vector<std::string> header = {x_field, y_field};
  if (gc >= 0) header.push_back(group_field);
  CsvWriter out(out_file, header);
  for (const auto& row : table.rows) {
    std::vector<std::string> cells = {row[xc], row[yc]};
    if (gc >= 0) cells.push_back(row[gc]);
    out.row(cells);
  }
  PlotdataResult result;
  if (table.rows.empty()) {
    result.warning = true;
    result.message = "input CSV has a header but no data rows";
  }
  return result;
}

}  // namespace netembed
