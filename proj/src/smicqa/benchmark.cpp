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

#include "smicqa/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "smicqa/error.hpp"
#include "smicqa/image.hpp"

namespace smicqa {

std::string to_string(Polarity polarity) { return polarity == Polarity::mos ? "mos" : "dmos"; }

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Comma-separated fields; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw ManifestError(line_no, "unterminated quote");
  fields.push_back(trim(field));
  return fields;
}

double parse_mos(const std::string& text, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ManifestError(line_no, "mos '" + text + "' is not a number");
  }
  if (used != text.size()) throw ManifestError(line_no, "mos '" + text + "' is not a number");
  if (!std::isfinite(v)) throw ManifestError(line_no, "mos must be finite");
  return v;
}

}  // namespace

BenchmarkManifest load_manifest(const std::filesystem::path& csv, const std::filesystem::path& root) {
  std::ifstream in(csv);
  if (!in) throw ManifestError(0, "cannot open manifest " + csv.string());

  BenchmarkManifest manifest;
  manifest.name = csv.stem().string();
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto header = split_csv(line, line_no);
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string name = header[i];
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (!columns.emplace(name, i).second) {
        throw ManifestError(line_no, "duplicate column '" + name + "'");
      }
    }
    break;
  }
  for (const char* required : {"ref", "dist", "mos"}) {
    if (!columns.count(required)) {
      throw ManifestError(line_no, std::string("header lacks required column '") + required + "'");
    }
  }
  const std::size_t width = columns.size();
  auto column = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = columns.find(name);
    return it == columns.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  };
  const auto c_ref = *column("ref");
  const auto c_dist = *column("dist");
  const auto c_mos = *column("mos");
  const auto c_split = column("split");
  const auto c_polarity = column("polarity");

  std::set<std::pair<std::string, std::string>> seen;
  std::optional<Polarity> polarity;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line, line_no);
    if (fields.size() != width) {
      throw ManifestError(line_no, "expected " + std::to_string(width) + " fields, got " +
                                       std::to_string(fields.size()));
    }
    ManifestRow row;
    row.line = line_no;
    if (fields[c_ref].empty() || fields[c_dist].empty()) {
      throw ManifestError(line_no, "empty ref or dist path");
    }
    row.ref = root / fields[c_ref];
    row.dist = root / fields[c_dist];
    row.mos = parse_mos(fields[c_mos], line_no);
    if (c_split) row.split = fields[*c_split];
    if (c_polarity && !fields[*c_polarity].empty()) {
      const auto& p = fields[*c_polarity];
      Polarity value;
      if (p == "mos" || p == "MOS") {
        value = Polarity::mos;
      } else if (p == "dmos" || p == "DMOS") {
        value = Polarity::dmos;
      } else {
        throw ManifestError(line_no, "polarity must be mos or dmos, got '" + p + "'");
      }
      if (polarity && *polarity != value) throw ManifestError(line_no, "polarity changes within the file");
      polarity = value;
    }
    if (!seen.emplace(fields[c_ref], fields[c_dist]).second) {
      throw ManifestError(line_no, "duplicate pair " + fields[c_ref] + ", " + fields[c_dist]);
    }
    for (const auto* p : {&row.ref, &row.dist}) {
      if (!std::filesystem::is_regular_file(*p)) {
        throw ManifestError(line_no, "cannot resolve " + p->string());
      }
    }
    manifest.rows.push_back(std::move(row));
  }
  if (polarity) manifest.polarity = *polarity;
  return manifest;
}

bool BenchmarkReport::any_aborted() const {
  return std::any_of(cells.begin(), cells.end(), [](const auto& c) { return c.aborted; });
}

double prediction_value(const QualityScore& score) {
  return score.metric == Metric::psnr && score.db ? *score.db : score.value;
}

namespace {

struct PairOutcome {
  std::vector<std::optional<double>> values;  // per cell
  std::vector<std::string> errors;            // per cell, empty when fine
};

PairOutcome score_row(const ManifestRow& row, const BenchmarkOptions& options,
                      const std::shared_ptr<const Backbone>& backbone) {
  PairOutcome out;
  out.values.resize(options.cells.size());
  out.errors.resize(options.cells.size());
  std::optional<PairContext> context;
  try {
    context.emplace(load_image(row.ref), load_image(row.dist), backbone);
  } catch (const std::exception& e) {
    for (auto& err : out.errors) err = e.what();
    return out;
  }
  for (std::size_t c = 0; c < options.cells.size(); ++c) {
    ScoreConfig config = options.base;
    config.metric = options.cells[c].metric;
    config.smic = options.cells[c].smic;
    try {
      const auto score = score_pair(config, *context);
      const double v = prediction_value(score);
      if (!std::isfinite(v)) throw Error("non-finite score");
      out.values[c] = v;
    } catch (const std::exception& e) {
      out.errors[c] = e.what();
    }
  }
  return out;
}

double improvement(double enhanced, double baseline) {
  return baseline == 0.0 ? 0.0 : (enhanced - baseline) / std::abs(baseline) * 100.0;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkManifest& manifest, const BenchmarkOptions& options,
                              std::shared_ptr<const Backbone> backbone) {
  if (manifest.rows.size() < kMinBenchmarkRows) {
    throw ManifestError(0, "correlation reporting needs at least " +
                               std::to_string(kMinBenchmarkRows) + " rows, manifest has " +
                               std::to_string(manifest.rows.size()));
  }
  if (options.cells.empty()) throw PreconditionError("no benchmark cells requested");
  options.base.validate();

  const std::size_t n = manifest.rows.size();
  std::vector<PairOutcome> outcomes(n);
  std::size_t threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      outcomes[i] = score_row(manifest.rows[i], options, backbone);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  BenchmarkReport report;
  report.dataset = manifest.name;
  report.polarity = manifest.polarity;
  report.pairs = n;
  report.config = options.base;
  report.backbone = !backbone ? "none"
                    : backbone->source() == BackboneSource::pretrained ? "pretrained"
                                                                       : "synthetic";
  std::vector<double> mos(n);
  for (std::size_t i = 0; i < n; ++i) mos[i] = manifest.rows[i].mos;

  for (std::size_t c = 0; c < options.cells.size(); ++c) {
    CorrelationReport cell;
    cell.metric = options.cells[c].metric;
    cell.smic_enabled = options.cells[c].smic;
    cell.n = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!outcomes[i].errors[c].empty()) {
        cell.aborted = true;
        cell.error_line = manifest.rows[i].line;
        cell.error = "row at line " + std::to_string(manifest.rows[i].line) + " (" +
                     manifest.rows[i].dist.filename().string() + "): " + outcomes[i].errors[c];
        break;
      }
      cell.predictions.push_back(*outcomes[i].values[c]);
    }
    if (!cell.aborted) {
      try {
        cell.srcc_signed = srcc(cell.predictions, mos);
        cell.srcc = std::abs(cell.srcc_signed);
        cell.plcc_raw = pearson(cell.predictions, mos);
        const auto fit = fit_logistic_and_plcc(cell.predictions, mos, options.fit);
        cell.plcc = fit.plcc;
        cell.plcc_signed = cell.plcc_raw < 0.0 ? -fit.plcc : fit.plcc;
        cell.logistic_params = fit.params;
        cell.converged = fit.converged;
      } catch (const std::exception& e) {
        cell.aborted = true;
        cell.error = std::string("correlation failed: ") + e.what();
      }
    }
    if (cell.aborted) cell.predictions.clear();
    report.cells.push_back(std::move(cell));
  }

  for (auto& cell : report.cells) {
    if (!cell.smic_enabled || cell.aborted) continue;
    for (const auto& base : report.cells) {
      if (base.metric == cell.metric && !base.smic_enabled && !base.aborted) {
        cell.srcc_improvement_pct = improvement(cell.srcc, base.srcc);
        cell.plcc_improvement_pct = improvement(cell.plcc, base.plcc);
        break;
      }
    }
  }
  return report;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_json(const BenchmarkReport& report) {
  const auto& c = report.config;
  ordered_json j;
  j["seed"] = c.seed;
  j["k"] = c.k;
  j["stages"] = std::to_string(c.stages.m) + ":" + std::to_string(c.stages.n);
  j["proj"] = c.projection == smic::ProjectionMode::shared ? "shared" : "independent";
  j["patch"] = c.patch;
  j["deep_stride"] = c.deep_stride;
  j["traditional_stride"] = c.traditional_stride;
  j["normalize"] = c.normalize;
  j["bound_exponent"] = c.bound_exponent;
  j["force_unit_attention"] = c.force_unit_attention;
  j["resample_per_patch"] = c.resample_per_patch;
  j["backbone"] = report.backbone;
  return j;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string report_to_json(const BenchmarkReport& report) {
  ordered_json root;
  root["dataset"] = report.dataset;
  root["polarity"] = to_string(report.polarity);
  root["pairs"] = report.pairs;
  root["config"] = config_json(report);
  root["fit"] = {{"form", "b1*(0.5-1/(1+exp(b2*(s-b3))))+b4*s+b5"},
                 {"optimizer", "nelder-mead"},
                 {"starts", kLogisticStarts}};
  ordered_json cells = ordered_json::array();
  for (const auto& cell : report.cells) {
    ordered_json j;
    j["metric"] = to_string(cell.metric);
    j["smic"] = cell.smic_enabled;
    j["prediction"] = cell.metric == Metric::psnr ? "db" : "value";
    j["n"] = cell.n;
    j["aborted"] = cell.aborted;
    if (cell.aborted) {
      j["error"] = cell.error;
      if (cell.error_line != 0) j["error_line"] = cell.error_line;
    } else {
      j["srcc"] = cell.srcc;
      j["srcc_signed"] = cell.srcc_signed;
      j["plcc"] = cell.plcc;
      j["plcc_signed"] = cell.plcc_signed;
      j["plcc_raw"] = cell.plcc_raw;
      j["logistic_params"] = cell.logistic_params;
      j["converged"] = cell.converged;
      if (cell.srcc_improvement_pct) j["srcc_improvement_pct"] = *cell.srcc_improvement_pct;
      if (cell.plcc_improvement_pct) j["plcc_improvement_pct"] = *cell.plcc_improvement_pct;
      j["predictions"] = cell.predictions;
    }
    cells.push_back(std::move(j));
  }
  root["cells"] = std::move(cells);
  return root.dump(2) + "\n";
}

std::string report_to_csv(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "dataset,polarity,metric,smic,n,srcc,plcc,srcc_improvement_pct,plcc_improvement_pct,"
        "converged,aborted,error\n";
  for (const auto& cell : report.cells) {
    os << report.dataset << ',' << to_string(report.polarity) << ',' << to_string(cell.metric) << ','
       << (cell.smic_enabled ? "on" : "off") << ',' << cell.n << ',';
    if (cell.aborted) {
      std::string err = cell.error;
      std::replace(err.begin(), err.end(), '"', '\'');
      os << ",,,,,true,\"" << err << "\"\n";
      continue;
    }
    os << format_number(cell.srcc) << ',' << format_number(cell.plcc) << ','
       << (cell.srcc_improvement_pct ? format_number(*cell.srcc_improvement_pct) : "") << ','
       << (cell.plcc_improvement_pct ? format_number(*cell.plcc_improvement_pct) : "") << ','
       << (cell.converged ? "true" : "false") << ",false,\n";
  }
  return os.str();
}

}  // namespace smicqa
