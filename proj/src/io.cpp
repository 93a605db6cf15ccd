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

#include "ssml/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#ifndef SSML_VERSION
#define SSML_VERSION "0.0.0"
#endif

namespace ssml::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(text) + "'");
  return value;
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(text) + "'");
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(text) + "'");
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_integer<int>(key, trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("empty list for '" + std::string(key) + "'");
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

template <typename Config>
using Setter = std::function<void(Config&, std::string_view key, std::string_view value)>;

template <typename Config>
Config apply_table(Config base, const KeyValues& kv, Dataset expected,
                   const std::map<std::string, Setter<Config>, std::less<>>& table) {
  for (const auto& [key, value] : kv) {
    if (key == "dataset") {
      if (dataset_from_string(value) != expected)
        throw ConfigError("config is for dataset '" + value + "', expected '" +
                          std::string(to_string(expected)) + "'");
      continue;
    }
    auto it = table.find(key);
    if (it == table.end())
      throw ConfigError("unknown key '" + key + "' for dataset '" +
                        std::string(to_string(expected)) + "'");
    it->second(base, key, trim(value));
  }
  return base;
}

#define SSML_INT_FIELD(field, type) \
  {#field, [](auto& c, auto k, auto v) { c.field = parse_integer<type>(k, v); }}
#define SSML_DOUBLE_FIELD(field) \
  {#field, [](auto& c, auto k, auto v) { c.field = parse_double(k, v); }}
#define SSML_LIST_FIELD(field) \
  {#field, [](auto& c, auto k, auto v) { c.field = parse_int_list(k, v); }}

std::string nan_aware(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view tool_version() { return SSML_VERSION; }

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(std::string(key), std::string(value)).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
  }
  return kv;
}

KeyValues parse_key_values(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_key_values(in);
}

std::string serialize_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::optional<Dataset> dataset_of(const KeyValues& kv) {
  auto it = kv.find("dataset");
  if (it == kv.end()) return std::nullopt;
  return dataset_from_string(it->second);
}

KeyValues to_key_values(const LocalConfig& c) {
  return {{"dataset", "local"},
          {"depths", join(c.depths)},
          {"halts", join(c.halts)},
          {"trials", std::to_string(c.trials)},
          {"a", format_double(c.a)},
          {"b", format_double(c.b)},
          {"clip_halfwidth", format_double(c.clip_halfwidth)},
          {"master_seed", std::to_string(c.master_seed)},
          {"max_shots", std::to_string(c.max_shots)},
          {"cert_eta", format_double(c.cert_eta)},
          {"share_streams", c.share_streams ? "true" : "false"}};
}

KeyValues to_key_values(const GlobalConfig& c) {
  return {{"dataset", "global"},
          {"depth", std::to_string(c.depth)},
          {"halts", join(c.halts)},
          {"trials", std::to_string(c.trials)},
          {"a", format_double(c.a)},
          {"b", format_double(c.b)},
          {"prior_halfwidth", format_double(c.prior_halfwidth)},
          {"master_seed", std::to_string(c.master_seed)},
          {"max_shots", std::to_string(c.max_shots)},
          {"cert_eta", format_double(c.cert_eta)}};
}

KeyValues to_key_values(const MultiscaleConfig& c) {
  return {{"dataset", "multiscale"},
          {"max_stage", std::to_string(c.max_stage)},
          {"m_halt", std::to_string(c.m_halt)},
          {"trials", std::to_string(c.trials)},
          {"a", format_double(c.a)},
          {"b", format_double(c.b)},
          {"clip_halfwidth", format_double(c.clip_halfwidth)},
          {"master_seed", std::to_string(c.master_seed)},
          {"max_shots", std::to_string(c.max_shots)}};
}

LocalConfig apply(LocalConfig base, const KeyValues& kv) {
  static const std::map<std::string, Setter<LocalConfig>, std::less<>> table{
      SSML_LIST_FIELD(depths),
      SSML_LIST_FIELD(halts),
      SSML_INT_FIELD(trials, int),
      SSML_DOUBLE_FIELD(a),
      SSML_DOUBLE_FIELD(b),
      SSML_DOUBLE_FIELD(clip_halfwidth),
      SSML_INT_FIELD(master_seed, std::uint64_t),
      SSML_INT_FIELD(max_shots, std::int64_t),
      SSML_DOUBLE_FIELD(cert_eta),
      {"share_streams", [](auto& c, auto k, auto v) { c.share_streams = parse_bool(k, v); }},
  };
  return apply_table(std::move(base), kv, Dataset::Local, table);
}

GlobalConfig apply(GlobalConfig base, const KeyValues& kv) {
  static const std::map<std::string, Setter<GlobalConfig>, std::less<>> table{
      SSML_INT_FIELD(depth, int),
      SSML_LIST_FIELD(halts),
      SSML_INT_FIELD(trials, int),
      SSML_DOUBLE_FIELD(a),
      SSML_DOUBLE_FIELD(b),
      SSML_DOUBLE_FIELD(prior_halfwidth),
      SSML_INT_FIELD(master_seed, std::uint64_t),
      SSML_INT_FIELD(max_shots, std::int64_t),
      SSML_DOUBLE_FIELD(cert_eta),
  };
  return apply_table(std::move(base), kv, Dataset::Global, table);
}

MultiscaleConfig apply(MultiscaleConfig base, const KeyValues& kv) {
  static const std::map<std::string, Setter<MultiscaleConfig>, std::less<>> table{
      SSML_INT_FIELD(max_stage, int),
      SSML_INT_FIELD(m_halt, int),
      SSML_INT_FIELD(trials, int),
      SSML_DOUBLE_FIELD(a),
      SSML_DOUBLE_FIELD(b),
      SSML_DOUBLE_FIELD(clip_halfwidth),
      SSML_INT_FIELD(master_seed, std::uint64_t),
      SSML_INT_FIELD(max_shots, std::int64_t),
  };
  return apply_table(std::move(base), kv, Dataset::Multiscale, table);
}

#undef SSML_INT_FIELD
#undef SSML_DOUBLE_FIELD
#undef SSML_LIST_FIELD

std::string format_double(double v) { return nan_aware(v); }

std::string cells_csv(const std::vector<CellResult>& cells) {
  std::string out(kCellsHeader);
  out += '\n';
  for (const auto& c : cells) {
    out += std::string(to_string(c.dataset)) + ',' + std::to_string(c.m) + ',' +
           std::to_string(c.m_halt) + ',' + std::to_string(c.trials) + ',' + format_double(c.nu) +
           ',' + format_double(c.nu_stderr) + ',' + format_double(c.r_total) + ',' +
           format_double(c.mean_eps) + ',' + format_double(c.eps_stderr) + ',' +
           format_double(c.rmse_theta) + ',' + format_double(c.rmse_stderr) + ',' +
           std::to_string(c.exhausted) + '\n';
  }
  return out;
}

std::string multiscale_csv(const std::vector<MultiscaleResult>& results) {
  std::string out(kMultiscaleHeader);
  out += '\n';
  for (const auto& r : results) {
    out += "multiscale," + std::to_string(r.max_stage) + ',' + std::to_string(r.m_halt) + ',' +
           std::to_string(r.trials) + ',' + format_double(r.r_tot_mean) + ',' +
           format_double(r.r_tot_stderr) + ',' + format_double(r.rmse_final) + ',' +
           format_double(r.rmse_stderr) + ',' + std::to_string(r.exhausted) + '\n';
  }
  return out;
}

std::string stages_csv(const std::vector<MultiscaleResult>& results) {
  std::string out(kStagesHeader);
  out += '\n';
  for (const auto& r : results)
    for (const auto& s : r.stages)
      out += std::to_string(r.max_stage) + ',' + std::to_string(s.stage) + ',' +
             std::to_string(s.m) + ',' + format_double(s.t_mean) + ',' + format_double(s.r_mean) + '\n';
  return out;
}

std::string fisher_csv(const std::vector<FisherRow>& rows) {
  std::string out(kFisherHeader);
  out += '\n';
  for (const auto& r : rows)
    out += format_double(r.delta) + ',' + format_double(r.i_cl) + ',' + format_double(r.f_q) + '\n';
  return out;
}

std::string certify_csv(const Certificate& cert, std::optional<double> fisher_q) {
  std::string out(kCertifyHeader);
  out += '\n';
  out += std::to_string(cert.m_halt) + ',' + format_double(cert.significance) + ',' +
         format_double(cert.eps_cert) + ',' +
         format_double(cert_scale_asymptotic(cert.m_halt, cert.significance)) + ',' +
         (fisher_q ? format_double(*fisher_q) : std::string()) + ',' +
         (cert.param_cert ? format_double(*cert.param_cert) : std::string()) + '\n';
  return out;
}

std::size_t CsvTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ConfigError("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (idx >= row.size()) throw ConfigError("short CSV row");
    const std::string& cell = row[idx];
    if (cell == "nan") {
      out.push_back(std::nan(""));
      continue;
    }
    out.push_back(parse_double(name, cell));
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    while (true) {
      const auto comma = line.find(',');
      fields.emplace_back(trim(line.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size())
        throw ConfigError("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                          std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw ConfigError("empty CSV");
  return table;
}

nlohmann::json to_json(const FitResult& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"n_points", fit.n_points}};
}

nlohmann::json to_json(const std::optional<FitResult>& fit) {
  return fit ? to_json(*fit) : nlohmann::json(nullptr);
}

namespace {
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json to_json(const CellResult& c) {
  return {{"dataset", to_string(c.dataset)},
          {"m", c.m},
          {"m_halt", c.m_halt},
          {"trials", c.trials},
          {"halted", c.halted},
          {"exhausted", c.exhausted},
          {"nu_mean", number_or_null(c.nu)},
          {"nu_stderr", number_or_null(c.nu_stderr)},
          {"r_total", number_or_null(c.r_total)},
          {"eps_mean", number_or_null(c.mean_eps)},
          {"eps_stderr", number_or_null(c.eps_stderr)},
          {"rmse_theta", number_or_null(c.rmse_theta)},
          {"rmse_stderr", number_or_null(c.rmse_stderr)},
          {"crb_overlay", c.nu > 0.0 ? number_or_null(crb_overlay(c.m, c.nu)) : nlohmann::json(nullptr)},
          {"cert_eta", c.cert_eta},
          {"cert_eps", cert_scale(c.m_halt, c.cert_eta)},
          {"cert_exceed", c.cert_exceed}};
}

nlohmann::json local_summary_json(const LocalConfig& config, const std::vector<CellResult>& cells) {
  const auto s = summarize_local(cells);
  nlohmann::json per_depth = nlohmann::json::array();
  for (const auto& d : s.rmse_vs_r) per_depth.push_back({{"m", d.m}, {"fit", to_json(d.fit)}});
  nlohmann::json per_depth_upper = nlohmann::json::array();
  for (const auto& d : s.rmse_vs_r_upper) per_depth_upper.push_back({{"m", d.m}, {"fit", to_json(d.fit)}});
  nlohmann::json gain = nlohmann::json::array();
  for (const auto& g : s.gain) gain.push_back({{"r_ref", g.r_ref}, {"fit", to_json(g.fit)}});

  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["dataset"] = "local";
  j["config"] = to_key_values(config);
  j["fits"] = {{"eps_vs_nu", to_json(s.eps_vs_nu)},
               {"rmse_vs_r_by_depth", per_depth},
               {"rmse_vs_r_by_depth_upper_half", per_depth_upper},
               {"rmse_vs_r_mean_slope", number_or_null(s.rmse_vs_r_mean_slope)},
               {"sqrt_r_rmse_vs_m", gain},
               {"sqrt_r_rmse_vs_m_mean_slope", number_or_null(s.gain_mean_slope)},
               {"entangled_below_product", s.entangled_below_product}};
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) j["cells"].push_back(to_json(c));
  return j;
}

nlohmann::json global_summary_json(const GlobalConfig& config, const std::vector<CellResult>& cells) {
  const auto s = summarize_global(cells);
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["dataset"] = "global";
  j["config"] = to_key_values(config);
  j["fits"] = {{"eps_vs_r", to_json(s.eps_vs_r)},
               {"rmse_vs_r", to_json(s.rmse_vs_r)},
               {"rmse_vs_r_upper_half", to_json(s.rmse_vs_r_upper)}};
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) j["cells"].push_back(to_json(c));
  return j;
}

nlohmann::json multiscale_summary_json(const MultiscaleConfig& config,
                                       const std::vector<MultiscaleResult>& results) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["dataset"] = "multiscale";
  j["config"] = to_key_values(config);
  j["fits"] = {{"rmse_final_vs_r_tot", to_json(summarize_multiscale(results))}};
  j["results"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : r.stages)
      stages.push_back({{"stage", s.stage}, {"m", s.m}, {"t_mean", s.t_mean}, {"r_mean", s.r_mean}});
    j["results"].push_back({{"J", r.max_stage},
                            {"m_halt", r.m_halt},
                            {"trials", r.trials},
                            {"halted", r.halted},
                            {"exhausted", r.exhausted},
                            {"r_tot_mean", number_or_null(r.r_tot_mean)},
                            {"r_tot_stderr", number_or_null(r.r_tot_stderr)},
                            {"rmse_final", number_or_null(r.rmse_final)},
                            {"rmse_stderr", number_or_null(r.rmse_stderr)},
                            {"stages", stages}});
  }
  return j;
}

nlohmann::json RunManifest::to_json() const {
  return {{"schema_version", kSchemaVersion},
          {"tool_version", tool_version},
          {"dataset", to_string(dataset)},
          {"config", config},
          {"master_seed", master_seed},
          {"started_utc", started_utc},
          {"finished_utc", finished_utc},
          {"output_sha256", output_sha256}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.dataset = dataset_from_string(j.at("dataset").get<std::string>());
    m.config = j.at("config").get<KeyValues>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.started_utc = j.value("started_utc", "");
    m.finished_utc = j.value("finished_utc", "");
    m.output_sha256 = j.value("output_sha256", std::map<std::string, std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ConfigError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

}  // namespace ssml::io
