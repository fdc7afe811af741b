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

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace smicqa {

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation. Throws DegenerateError when either side has zero
// variance.
double pearson(std::span<const double> a, std::span<const double> b);

// Spearman correlation: Pearson of the average-rank vectors. Needs equal
// lengths >= 3.
double srcc(std::span<const double> pred, std::span<const double> mos);

using LogisticParams = std::array<double, 5>;

// b1 * (1/2 - 1 / (1 + exp(b2 (s - b3)))) + b4 s + b5
double logistic5(const LogisticParams& b, double s);

struct NelderMeadOptions {
  std::size_t max_iterations = 2000;
  double tolerance = 1e-9;  // relative spread of simplex values
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

struct LogisticFit {
  LogisticParams params{};
  double plcc = 0.0;       // |Pearson(q(pred), mos)|
  double plcc_signed = 0.0;
  double sse = 0.0;
  bool converged = false;  // false: affine fallback
  std::size_t starts = 0;
};

inline constexpr std::size_t kLogisticStarts = 5;
inline constexpr std::size_t kMinFitSamples = 10;

// Least-squares fit of the five-parameter logistic from several starts, one of
// which is the exact affine fit. Needs equal lengths >= 10.
LogisticFit fit_logistic_and_plcc(std::span<const double> pred, std::span<const double> mos,
                                  const NelderMeadOptions& options = {});

}  // namespace smicqa
