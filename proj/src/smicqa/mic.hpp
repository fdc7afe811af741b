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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace smicqa::mic {

inline constexpr double kDefaultBoundExponent = 0.5;
inline constexpr std::size_t kExactSearchLimit = 64;
inline constexpr std::size_t kMinSamples = 4;

// N paired finite observations of (X, Y), N >= 4.
class SamplePairs {
 public:
  SamplePairs(std::vector<double> xs, std::vector<double> ys);

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::size_t size() const { return xs_.size(); }

  SamplePairs swapped() const { return SamplePairs(ys_, xs_); }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

struct GridShape {
  std::size_t nx;
  std::size_t ny;
  auto operator<=>(const GridShape&) const = default;
};

// Cells are half-open [cut_{i-1}, cut_i) with the outermost bins unbounded, so
// every sample lands in exactly one cell.
struct GridPartition {
  std::vector<double> x_cuts;
  std::vector<double> y_cuts;

  std::size_t nx() const { return x_cuts.size() + 1; }
  std::size_t ny() const { return y_cuts.size() + 1; }
  GridPartition transposed() const { return {y_cuts, x_cuts}; }
  bool operator==(const GridPartition&) const = default;
};

struct MicResult {
  double value = 0.0;       // in [0, 1]
  GridPartition best_grid;  // grid attaining `value`
  double best_mi = 0.0;     // nats
};

// Empirical mutual information (nats) of the samples under `grid`. Empty cells
// contribute zero.
double mi_under_grid(const SamplePairs& samples, const GridPartition& grid);

// {(nx, ny) : nx, ny >= 2, nx * ny < n^bound_exponent} plus the (2, 2)
// fallback, sorted lexicographically.
std::vector<GridShape> admissible_grid_shapes(std::size_t n,
                                              double bound_exponent = kDefaultBoundExponent);

// Exhaustive MIC over every admissible shape and every placement of cuts
// between consecutive distinct sorted coordinates. Ties between grids go to the
// lexicographically first (nx, ny, x cuts, y cuts).
MicResult exact_mic(const SamplePairs& samples, double bound_exponent = kDefaultBoundExponent,
                    std::size_t max_samples = kExactSearchLimit);

// Heuristic MIC: one axis is equipartitioned by rank, the other is optimised by
// dynamic programming over rank boundaries; both orientations are tried.
MicResult approx_mic(const SamplePairs& samples, double bound_exponent = kDefaultBoundExponent);

// Reusable approx_mic evaluator for hot loops. Keeps scratch buffers between
// calls, so one instance must not be shared between threads.
class ApproxMic {
 public:
  explicit ApproxMic(double bound_exponent = kDefaultBoundExponent);
  ApproxMic(const ApproxMic&);
  ApproxMic& operator=(const ApproxMic&);
  ApproxMic(ApproxMic&&) noexcept;
  ApproxMic& operator=(ApproxMic&&) noexcept;
  ~ApproxMic();

  // Value only. Inputs must have equal length >= 4 and finite entries.
  double operator()(std::span<const double> xs, std::span<const double> ys);

  MicResult solve(std::span<const double> xs, std::span<const double> ys);

  double bound_exponent() const { return bound_exponent_; }

 private:
  struct Workspace;

  double bound_exponent_;
  std::unique_ptr<Workspace> ws_;
};

}  // namespace smicqa::mic
