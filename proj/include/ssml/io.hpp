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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ssml/certificates.hpp"
#include "ssml/experiments.hpp"

namespace ssml::io {

inline constexpr int kSchemaVersion = 1;

/// Version string compiled into the library.
std::string_view tool_version();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Flat key = value configuration files.
//
//   # comment
//   dataset = local
//   depths = 1,2,4,8
//   trials = 10000
//
// Keys are case-sensitive; unknown keys are rejected. Doubles are written
// with 17 significant digits so a config survives a write/read cycle.

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues parse_key_values(std::string_view text);
std::string serialize_key_values(const KeyValues& kv);

KeyValues to_key_values(const LocalConfig& c);
KeyValues to_key_values(const GlobalConfig& c);
KeyValues to_key_values(const MultiscaleConfig& c);

/// Overlay `kv` on `base`. A "dataset" key, if present, must match.
LocalConfig apply(LocalConfig base, const KeyValues& kv);
GlobalConfig apply(GlobalConfig base, const KeyValues& kv);
MultiscaleConfig apply(MultiscaleConfig base, const KeyValues& kv);

/// Dataset named by the "dataset" key, if any.
std::optional<Dataset> dataset_of(const KeyValues& kv);

// ---------------------------------------------------------------------------
// CSV output. Numbers use %.17g; NaN is written as "nan".

std::string format_double(double v);

inline constexpr std::string_view kCellsHeader =
    "dataset,m,m_halt,trials,nu_mean,nu_stderr,r_total,eps_mean,eps_stderr,"
    "rmse_theta,rmse_stderr,exhausted";
inline constexpr std::string_view kMultiscaleHeader =
    "dataset,J,m_halt,trials,r_tot_mean,r_tot_stderr,rmse_final,rmse_stderr,exhausted";
inline constexpr std::string_view kStagesHeader = "J,stage,m,t_mean,r_mean";
inline constexpr std::string_view kFisherHeader = "delta,i_cl,f_q";
inline constexpr std::string_view kCertifyHeader =
    "m_halt,eta,eps_cert,eps_cert_asymptotic,f_q,param_cert";

std::string cells_csv(const std::vector<CellResult>& cells);
std::string multiscale_csv(const std::vector<MultiscaleResult>& results);
std::string stages_csv(const std::vector<MultiscaleResult>& results);
std::string fisher_csv(const std::vector<FisherRow>& rows);
std::string certify_csv(const Certificate& cert, std::optional<double> fisher_q);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws ConfigError when absent.
  std::size_t column_index(std::string_view name) const;
  /// Column parsed as doubles.
  std::vector<double> numeric_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

// ---------------------------------------------------------------------------
// JSON summaries.

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const std::optional<FitResult>& fit);
nlohmann::json to_json(const CellResult& cell);
nlohmann::json local_summary_json(const LocalConfig& config, const std::vector<CellResult>& cells);
nlohmann::json global_summary_json(const GlobalConfig& config, const std::vector<CellResult>& cells);
nlohmann::json multiscale_summary_json(const MultiscaleConfig& config,
                                       const std::vector<MultiscaleResult>& results);

// ---------------------------------------------------------------------------
// Run manifests.

struct RunManifest {
  std::string tool_version;
  Dataset dataset = Dataset::Local;
  KeyValues config;
  std::uint64_t master_seed = 0;
  std::string started_utc;
  std::string finished_utc;
  std::map<std::string, std::string> output_sha256;  ///< file name -> hex digest

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string sha256_hex(std::string_view bytes);
std::string utc_timestamp();

std::string read_file(const std::string& path);
/// Writes via a temporary sibling and rename, so readers never see a
/// partially written file.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace ssml::io
