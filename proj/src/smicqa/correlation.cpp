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

#include "smicqa/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "smicqa/error.hpp"

namespace smicqa {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("correlation inputs differ in length");
  if (a.size() < 2) throw PreconditionError("correlation needs at least 2 samples");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw PreconditionError("correlation inputs must be finite");
    }
  }
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateError("zero variance; correlation undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double srcc(std::span<const double> pred, std::span<const double> mos) {
  if (pred.size() != mos.size()) throw PreconditionError("srcc inputs differ in length");
  if (pred.size() < 3) throw PreconditionError("srcc needs at least 3 samples");
  const auto rp = average_ranks(pred);
  const auto rm = average_ranks(mos);
  try {
    return pearson(rp, rm);
  } catch (const DegenerateError&) {
    throw DegenerateError("degenerate ranks: all values tied on one side");
  }
}

double logistic5(const LogisticParams& b, double s) {
  return b[0] * (0.5 - 1.0 / (1.0 + std::exp(b[1] * (s - b[2])))) + b[3] * s + b[4];
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) throw PreconditionError("nelder_mead needs at least one parameter");
  auto eval = [&](std::span<const double> x) {
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) {
    simplex[i + 1][i] += options.initial_step * std::max(1.0, std::abs(start[i]));
  }
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  NelderMeadResult result;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];
    result.iterations = it;
    const double spread = std::abs(values[worst] - values[best]);
    const double scale = (std::abs(values[worst]) + std::abs(values[best])) / 2.0;
    if (spread <= options.tolerance * scale + std::numeric_limits<double>::min()) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double t, std::vector<double>& out) {
      for (std::size_t d = 0; d < dim; ++d) out[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
    };
    blend(-1.0, trial);
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      blend(-2.0, trial2);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    blend(outside ? -0.5 : 0.5, trial2);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      }
      values[i] = eval(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  if (!result.converged) result.iterations = options.max_iterations;
  return result;
}

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  Moments m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(ss / n);
  return m;
}

// Exact least-squares a, c for y ~ a q + c.
std::pair<double, double> affine_fit(std::span<const double> q, std::span<const double> y) {
  const Moments mq = moments(q);
  const Moments my = moments(y);
  double sqy = 0.0, sqq = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    sqy += (q[i] - mq.mean) * (y[i] - my.mean);
    sqq += (q[i] - mq.mean) * (q[i] - mq.mean);
  }
  if (sqq == 0.0) return {0.0, my.mean};
  const double a = sqy / sqq;
  return {a, my.mean - a * mq.mean};
}

}  // namespace

LogisticFit fit_logistic_and_plcc(std::span<const double> pred, std::span<const double> mos,
                                  const NelderMeadOptions& options) {
  if (pred.size() != mos.size()) throw PreconditionError("logistic fit inputs differ in length");
  if (pred.size() < kMinFitSamples) {
    throw PreconditionError("logistic fit needs at least " + std::to_string(kMinFitSamples) +
                            " samples, got " + std::to_string(pred.size()));
  }
  const double raw = pearson(pred, mos);  // also rejects constant inputs
  const std::size_t n = pred.size();

  // Fit in standardised units for conditioning.
  const Moments mp = moments(pred);
  const Moments mm = moments(mos);
  std::vector<double> z(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = (pred[i] - mp.mean) / mp.sd;
    y[i] = (mos[i] - mm.mean) / mm.sd;
  }
  auto sse_of = [&](const LogisticParams& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = logistic5(b, z[i]) - y[i];
      acc += r * r;
    }
    return acc;
  };
  auto objective = [&](std::span<const double> x) {
    return sse_of({x[0], x[1], x[2], x[3], x[4]});
  };

  const double sign = raw >= 0.0 ? 1.0 : -1.0;
  const auto [y_min, y_max] = std::minmax_element(y.begin(), y.end());
  const double span = *y_max - *y_min;
  std::vector<double> sorted_z(z);
  std::sort(sorted_z.begin(), sorted_z.end());
  const double median = sorted_z[n / 2];
  const std::vector<std::vector<double>> starts{
      {0.0, 1.0, 0.0, raw, 0.0},  // exact affine fit in these units
      {sign * span, 1.0, median, 0.0, 0.0},
      {sign * span, 2.0, median, 0.0, 0.0},
      {sign * span, 0.5, 0.0, 0.0, 0.0},
      {sign * span / 2.0, 1.0, median, raw / 2.0, 0.0},
  };

  LogisticFit fit;
  fit.starts = starts.size();
  LogisticParams best{};
  double best_sse = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  std::vector<double> q(n);
  for (const auto& start : starts) {
    const auto nm = nelder_mead(objective, start, options);
    any_converged = any_converged || nm.converged;
    LogisticParams b{nm.x[0], nm.x[1], nm.x[2], nm.x[3], nm.x[4]};
    // Re-solve the output affine part exactly: the family is closed under it.
    for (std::size_t i = 0; i < n; ++i) q[i] = logistic5(b, z[i]);
    const auto [a, c] = affine_fit(q, y);
    b[0] *= a;
    b[3] *= a;
    b[4] = a * b[4] + c;
    const double sse = sse_of(b);
    if (std::isfinite(sse) && sse < best_sse) {
      best_sse = sse;
      best = b;
    }
  }
  if (!any_converged || !std::isfinite(best_sse)) {
    best = {0.0, 1.0, 0.0, raw, 0.0};
    best_sse = sse_of(best);
  }
  fit.converged = any_converged;

  for (std::size_t i = 0; i < n; ++i) q[i] = logistic5(best, z[i]);
  double signed_plcc = raw;
  try {
    signed_plcc = pearson(q, y);
  } catch (const DegenerateError&) {
    signed_plcc = raw;
  }
  fit.plcc_signed = signed_plcc;
  fit.plcc = std::abs(signed_plcc);
  fit.sse = best_sse * mm.sd * mm.sd;

  // Back to original units: q(s) = sd_m * q'((s - mean_p) / sd_p) + mean_m.
  fit.params[0] = mm.sd * best[0];
  fit.params[1] = best[1] / mp.sd;
  fit.params[2] = mp.mean + mp.sd * best[2];
  fit.params[3] = mm.sd * best[3] / mp.sd;
  fit.params[4] = mm.sd * best[4] + mm.mean - mm.sd * best[3] * mp.mean / mp.sd;
  return fit;
}

}  // namespace smicqa
