// Copyright 2026 The smicqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smicqa/backbone.hpp"
#include "smicqa/correlation.hpp"
#include "smicqa/scoring.hpp"

namespace smicqa {

enum class Polarity { mos, dmos };

std::string to_string(Polarity polarity);

struct ManifestRow {
  std::size_t line = 0;  // 1-based line in the CSV file
  std::filesystem::path ref;
  std::filesystem::path dist;
  double mos = 0.0;
  std::string split;
};

struct BenchmarkManifest {
  std::string name;
  Polarity polarity = Polarity::mos;
  std::vector<ManifestRow> rows;
};

// CSV with a header naming at least ref, dist and mos; optional split and
// polarity (mos|dmos, constant over the file) columns. Paths are joined
// against `root` and must exist. Throws ManifestError.
BenchmarkManifest load_manifest(const std::filesystem::path& csv, const std::filesystem::path& root);

struct CellConfig {
  Metric metric = Metric::psnr;
  bool smic = false;
};

struct BenchmarkOptions {
  // Template for every cell; metric and smic are overwritten per cell.
  ScoreConfig base;
  std::vector<CellConfig> cells;
  std::size_t threads = 0;  // 0: hardware concurrency
  NelderMeadOptions fit;
};

// One (metric, smic) cell of the results table.
struct CorrelationReport {
  Metric metric = Metric::psnr;
  bool smic_enabled = false;
  std::size_t n = 0;
  bool aborted = false;
  std::string error;            // set when aborted
  std::size_t error_line = 0;   // manifest line of the failing row
  double srcc = 0.0;            // |rho_s|
  double srcc_signed = 0.0;
  double plcc = 0.0;            // |rho_p| after logistic alignment
  double plcc_signed = 0.0;
  double plcc_raw = 0.0;        // before alignment, signed
  LogisticParams logistic_params{};
  bool converged = false;
  // Relative change against the smic-off cell of the same metric, percent.
  std::optional<double> srcc_improvement_pct;
  std::optional<double> plcc_improvement_pct;
  std::vector<double> predictions;
};

struct BenchmarkReport {
  std::string dataset;
  Polarity polarity = Polarity::mos;
  std::size_t pairs = 0;
  ScoreConfig config;
  std::string backbone;  // "pretrained", "synthetic" or "none"
  std::vector<CorrelationReport> cells;

  bool any_aborted() const;
};

inline constexpr std::size_t kMinBenchmarkRows = 10;

// Scalar fed to the correlations: PSNR uses dB, the others their score value.
double prediction_value(const QualityScore& score);

// Scores every pair for every cell (pairs in parallel) and correlates with
// MOS. A failing pair aborts only the cells it failed in.
BenchmarkReport run_benchmark(const BenchmarkManifest& manifest, const BenchmarkOptions& options,
                              std::shared_ptr<const Backbone> backbone);

std::string report_to_json(const BenchmarkReport& report);
std::string report_to_csv(const BenchmarkReport& report);

}  // namespace smicqa
