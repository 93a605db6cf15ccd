// Copyright 2026 The ssml-sense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: runs the three Monte Carlo datasets, prints
// certificates and Fisher-matching tables, and re-fits emitted CSVs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssml/certificates.hpp"
#include "ssml/experiments.hpp"
#include "ssml/io.hpp"
#include "ssml/parallel.hpp"
#include "ssml/probes.hpp"
#include "ssml/stats.hpp"

namespace fs = std::filesystem;
using namespace ssml;

namespace {

constexpr const char* kSeedEnv = "SSML_SEED";

struct RunOptions {
  std::string config_path;
  std::string manifest_path;
  std::vector<std::string> overrides;  // key=value
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out_dir = ".";
};

// Defaults < $SSML_SEED < config file / manifest < --set < dedicated flags.
io::KeyValues resolve_key_values(const RunOptions& o, Dataset dataset) {
  io::KeyValues kv;
  if (const char* env = std::getenv(kSeedEnv); env && *env) kv["master_seed"] = env;

  io::KeyValues file;
  if (!o.config_path.empty()) {
    file = io::parse_key_values(io::read_file(o.config_path));
  } else if (!o.manifest_path.empty()) {
    file = io::RunManifest::from_json(nlohmann::json::parse(io::read_file(o.manifest_path))).config;
  }
  if (auto d = io::dataset_of(file); d && *d != dataset)
    throw io::ConfigError("config describes dataset '" + std::string(to_string(*d)) + "'");
  for (const auto& [k, v] : file) kv[k] = v;

  for (const auto& assignment : o.overrides) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw io::ConfigError("--set expects key=value, got '" + assignment + "'");
    kv[assignment.substr(0, eq)] = assignment.substr(eq + 1);
  }
  if (o.trials) kv["trials"] = std::to_string(*o.trials);
  if (o.seed) kv["master_seed"] = std::to_string(*o.seed);
  kv.erase("dataset");
  return kv;
}

struct Output {
  std::string name;
  std::string contents;
};

// Everything is rendered in memory first; files are only written once the
// whole run has succeeded.
void write_outputs(const RunOptions& o, Dataset dataset, const io::KeyValues& config,
                   std::uint64_t seed, const std::string& started, const std::vector<Output>& outputs) {
  fs::create_directories(o.out_dir);
  io::RunManifest manifest;
  manifest.tool_version = std::string(io::tool_version());
  manifest.dataset = dataset;
  manifest.config = config;
  manifest.master_seed = seed;
  manifest.started_utc = started;
  manifest.finished_utc = io::utc_timestamp();
  for (const auto& out : outputs) {
    manifest.output_sha256[out.name] = io::sha256_hex(out.contents);
    io::write_file_atomic((fs::path(o.out_dir) / out.name).string(), out.contents);
  }
  io::write_file_atomic((fs::path(o.out_dir) / "manifest.json").string(),
                        manifest.to_json().dump(2) + "\n");
  for (const auto& out : outputs) std::cout << (fs::path(o.out_dir) / out.name).string() << "\n";
}

int run_local(const RunOptions& o) {
  const auto started = io::utc_timestamp();
  const auto config = io::apply(LocalConfig{}, resolve_key_values(o, Dataset::Local));
  const auto cells = run_local_fixed_depth(config, o.threads);
  write_outputs(o, Dataset::Local, io::to_key_values(config), config.master_seed, started,
                {{"cells.csv", io::cells_csv(cells)},
                 {"summary.json", io::local_summary_json(config, cells).dump(2) + "\n"}});
  return 0;
}

int run_global(const RunOptions& o) {
  const auto started = io::utc_timestamp();
  const auto config = io::apply(GlobalConfig{}, resolve_key_values(o, Dataset::Global));
  const auto cells = run_global_aliasing(config, o.threads);
  write_outputs(o, Dataset::Global, io::to_key_values(config), config.master_seed, started,
                {{"cells.csv", io::cells_csv(cells)},
                 {"summary.json", io::global_summary_json(config, cells).dump(2) + "\n"}});
  return 0;
}

int run_multi(const RunOptions& o) {
  const auto started = io::utc_timestamp();
  const auto config = io::apply(MultiscaleConfig{}, resolve_key_values(o, Dataset::Multiscale));
  const auto results = run_multiscale(config, o.threads);
  write_outputs(o, Dataset::Multiscale, io::to_key_values(config), config.master_seed, started,
                {{"multiscale.csv", io::multiscale_csv(results)},
                 {"stages.csv", io::stages_csv(results)},
                 {"summary.json", io::multiscale_summary_json(config, results).dump(2) + "\n"}});
  return 0;
}

std::vector<double> delta_grid(const std::vector<double>& explicit_deltas, double lo, double hi,
                               int points, const std::string& scale, bool include_zero) {
  std::vector<double> grid;
  if (include_zero) grid.push_back(0.0);
  if (!explicit_deltas.empty()) {
    grid.insert(grid.end(), explicit_deltas.begin(), explicit_deltas.end());
    return grid;
  }
  if (points < 1) throw io::ConfigError("--points must be >= 1");
  if (scale == "log" && !(lo > 0.0 && hi > 0.0))
    throw io::ConfigError("log grid needs positive bounds");
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid.push_back(scale == "log" ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                  : lo + t * (hi - lo));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-shot measurement learning sensing simulator"};
  app.set_version_flag("--version", std::string(io::tool_version()));
  app.require_subcommand(1);

  RunOptions local_opts, global_opts, multi_opts;
  auto* local_cmd = app.add_subcommand("run-local", "branch-resolved fixed-depth dataset");
  auto* global_cmd = app.add_subcommand("run-global", "single-scale global-prior aliasing dataset");
  auto* multi_cmd = app.add_subcommand("run-multiscale", "ideal coarse-to-fine hand-off dataset");
  for (auto [cmd, opts] : {std::pair{local_cmd, &local_opts}, std::pair{global_cmd, &global_opts},
                           std::pair{multi_cmd, &multi_opts}}) {
    cmd->add_option("-c,--config", opts->config_path, "key = value config file");
    cmd->add_option("--from-manifest", opts->manifest_path, "re-run the config recorded in a manifest.json")
        ->excludes("--config");
    cmd->add_option("-s,--set", opts->overrides, "override a config key (key=value), repeatable");
    cmd->add_option("--trials", opts->trials, "trials per cell");
    cmd->add_option("--seed", opts->seed, "master seed (default: $SSML_SEED or built-in)");
    cmd->add_option("-j,--threads", opts->threads, "worker threads (0 = all cores)");
    cmd->add_option("-o,--out", opts->out_dir, "output directory")->required();
  }

  int cert_m_halt = 0;
  double cert_eta = 0.05;
  std::optional<double> cert_fq;
  std::string cert_csv;
  auto* certify_cmd = app.add_subcommand("certify", "certificate scales for a terminal run");
  certify_cmd->add_option("-M,--m-halt", cert_m_halt, "terminal run length")->required();
  certify_cmd->add_option("-e,--eta", cert_eta, "significance level in (0, 1]");
  certify_cmd->add_option("-F,--fisher", cert_fq, "quantum Fisher information F_Q");
  certify_cmd->add_option("--csv", cert_csv, "also write the table to this CSV file");

  int fisher_m = 1;
  std::vector<double> fisher_deltas;
  double fisher_lo = 1e-4, fisher_hi = 1.0;
  int fisher_points = 41;
  std::string fisher_scale = "log";
  bool fisher_zero = false;
  std::string fisher_out;
  auto* fisher_cmd = app.add_subcommand("fisher", "one-bit Fisher information versus QFI for a NOON probe");
  fisher_cmd->add_option("-m,--depth", fisher_m, "NOON depth")->required();
  fisher_cmd->add_option("--deltas", fisher_deltas, "explicit mismatch grid")->delimiter(',');
  fisher_cmd->add_option("--delta-min", fisher_lo, "grid lower bound");
  fisher_cmd->add_option("--delta-max", fisher_hi, "grid upper bound");
  fisher_cmd->add_option("--points", fisher_points, "grid size");
  fisher_cmd->add_option("--scale", fisher_scale, "grid spacing")->check(CLI::IsMember({"log", "linear"}));
  fisher_cmd->add_flag("--include-zero", fisher_zero, "prepend the delta = 0 limit row");
  fisher_cmd->add_option("-o,--out", fisher_out, "write CSV here instead of stdout");

  std::string fit_csv, fit_x, fit_y;
  std::vector<std::string> fit_filters;
  auto* fit_cmd = app.add_subcommand("fit", "log-log OLS over two CSV columns");
  fit_cmd->add_option("csv", fit_csv, "input CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("-x", fit_x, "x column")->required();
  fit_cmd->add_option("-y", fit_y, "y column")->required();
  fit_cmd->add_option("--where", fit_filters, "keep rows with column=value, repeatable");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*local_cmd) return run_local(local_opts);
    if (*global_cmd) return run_global(global_opts);
    if (*multi_cmd) return run_multi(multi_opts);

    if (*certify_cmd) {
      const auto cert = Certificate::make(cert_m_halt, cert_eta, cert_fq);
      const auto table = io::certify_csv(cert, cert_fq);
      std::cout << table;
      if (!cert_csv.empty()) io::write_file_atomic(cert_csv, table);
      return 0;
    }

    if (*fisher_cmd) {
      const NoonProbe probe(fisher_m);
      const auto grid = delta_grid(fisher_deltas, fisher_lo, fisher_hi, fisher_points, fisher_scale, fisher_zero);
      const auto table = io::fisher_csv(fisher_matching_curve(probe, grid));
      if (fisher_out.empty())
        std::cout << table;
      else
        io::write_file_atomic(fisher_out, table);
      return 0;
    }

    if (*fit_cmd) {
      auto table = io::parse_csv(io::read_file(fit_csv));
      for (const auto& f : fit_filters) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) throw io::ConfigError("--where expects column=value");
        const auto idx = table.column_index(f.substr(0, eq));
        const auto want = f.substr(eq + 1);
        std::erase_if(table.rows, [&](const auto& row) { return row[idx] != want; });
      }
      const auto xs = table.numeric_column(fit_x);
      const auto ys = table.numeric_column(fit_y);
      std::vector<Point> pts;
      for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({xs[i], ys[i]});
      auto j = io::to_json(ols_loglog(pts));
      j["x"] = fit_x;
      j["y"] = fit_y;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ssml: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
