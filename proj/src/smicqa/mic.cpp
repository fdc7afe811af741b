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

#include "smicqa/mic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "smicqa/error.hpp"

namespace smicqa::mic {
namespace {

void validate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw PreconditionError("sample sequences differ in length (" + std::to_string(xs.size()) +
                            " vs " + std::to_string(ys.size()) + ")");
  }
  if (xs.size() < kMinSamples) {
    throw PreconditionError("MIC needs at least " + std::to_string(kMinSamples) +
                            " samples, got " + std::to_string(xs.size()));
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(xs.begin(), xs.end(), finite) || !std::all_of(ys.begin(), ys.end(), finite)) {
    throw PreconditionError("samples must be finite");
  }
}

// Distinct values of one axis in ascending order, and which of them each
// sample holds.
struct RankGroups {
  std::vector<std::uint32_t> group_of;
  std::vector<double> value;
  std::vector<std::uint32_t> first;  // sorted position of the group's first member

  std::size_t count() const { return value.size(); }
};

void build_rank_groups(std::span<const double> v, std::vector<std::uint32_t>& order,
                       RankGroups& out) {
  const std::size_t n = v.size();
  order.resize(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
  out.group_of.resize(n);
  out.value.clear();
  out.first.clear();
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::uint32_t i = order[pos];
    if (pos == 0 || v[order[pos - 1]] < v[i]) {
      out.value.push_back(v[i]);
      out.first.push_back(static_cast<std::uint32_t>(pos));
    }
    out.group_of[i] = static_cast<std::uint32_t>(out.value.size() - 1);
  }
}

// A cut separating `lo` from `hi` (lo < hi) under the "v >= cut goes up" rule.
double cut_between(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return lo < mid ? mid : hi;
}

// Sum of (c/n) log(c n / (row * col)) over non-empty cells. Terms are summed
// in sorted order so the value does not depend on table orientation.
double mutual_information(std::span<const int> table, std::size_t rows, std::size_t cols,
                          std::vector<double>& terms, std::vector<double>& row_sum,
                          std::vector<double>& col_sum) {
  row_sum.assign(rows, 0.0);
  col_sum.assign(cols, 0.0);
  double n = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double count = table[r * cols + c];
      row_sum[r] += count;
      col_sum[c] += count;
      n += count;
    }
  }
  terms.clear();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double count = table[r * cols + c];
      if (count > 0.0) {
        terms.push_back(count / n * std::log(count * n / (row_sum[r] * col_sum[c])));
      }
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double t : terms) mi += t;
  return std::max(0.0, mi);
}

double normalise(double mi, std::size_t nx, std::size_t ny) {
  const double v = mi / std::log(static_cast<double>(std::min(nx, ny)));
  return std::clamp(v, 0.0, 1.0);
}

GridPartition fallback_grid(const RankGroups& gx, const RankGroups& gy) {
  auto cut = [](const RankGroups& g) {
    return g.count() >= 2 ? cut_between(g.value[0], g.value[1]) : g.value[0];
  };
  return {{cut(gx)}, {cut(gy)}};
}

// Advances `c` (strictly increasing values in [1, m]) to the next combination in
// lexicographic order. Returns false after the last one.
bool next_combination(std::vector<std::size_t>& c, std::size_t m) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < m - (k - 1 - i)) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SamplePairs::SamplePairs(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  validate(xs_, ys_);
}

double mi_under_grid(const SamplePairs& samples, const GridPartition& grid) {
  auto check_cuts = [](const std::vector<double>& cuts, const char* axis) {
    if (cuts.empty()) {
      throw PreconditionError(std::string("grid needs at least 2 bins on the ") + axis + " axis");
    }
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      if (!std::isfinite(cuts[i]) || (i > 0 && !(cuts[i - 1] < cuts[i]))) {
        throw PreconditionError(std::string(axis) + " cuts must be finite and strictly increasing");
      }
    }
  };
  check_cuts(grid.x_cuts, "x");
  check_cuts(grid.y_cuts, "y");

  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  std::vector<int> table(nx * ny, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto bx = static_cast<std::size_t>(
        std::upper_bound(grid.x_cuts.begin(), grid.x_cuts.end(), samples.xs()[i]) -
        grid.x_cuts.begin());
    const auto by = static_cast<std::size_t>(
        std::upper_bound(grid.y_cuts.begin(), grid.y_cuts.end(), samples.ys()[i]) -
        grid.y_cuts.begin());
    ++table[bx * ny + by];
  }
  std::vector<double> terms, rs, cs;
  return mutual_information(table, nx, ny, terms, rs, cs);
}

std::vector<GridShape> admissible_grid_shapes(std::size_t n, double bound_exponent) {
  const double bound = std::pow(static_cast<double>(n), bound_exponent);
  std::vector<GridShape> shapes;
  for (std::size_t nx = 2; static_cast<double>(nx * 2) < bound; ++nx) {
    for (std::size_t ny = 2; static_cast<double>(nx * ny) < bound; ++ny) {
      shapes.push_back({nx, ny});
    }
  }
  if (shapes.empty()) shapes.push_back({2, 2});
  return shapes;
}

MicResult exact_mic(const SamplePairs& samples, double bound_exponent, std::size_t max_samples) {
  const std::size_t n = samples.size();
  if (n > max_samples) {
    throw SearchTooLargeError("exhaustive search too large: " + std::to_string(n) +
                              " samples exceeds the limit of " + std::to_string(max_samples) +
                              "; use approx_mic instead");
  }
  std::vector<std::uint32_t> order;
  RankGroups gx, gy;
  build_rank_groups(samples.xs(), order, gx);
  build_rank_groups(samples.ys(), order, gy);
  const std::size_t dx = gx.count();
  const std::size_t dy = gy.count();

  // Joint counts over (x group, y group).
  std::vector<int> joint(dx * dy, 0);
  for (std::size_t i = 0; i < n; ++i) ++joint[gx.group_of[i] * dy + gy.group_of[i]];

  MicResult best{-1.0, fallback_grid(gx, gy), 0.0};
  std::vector<int> collapsed, table;
  std::vector<std::size_t> xbin(dx), ybin(dy);
  std::vector<double> terms, rs, cs;

  for (const auto& shape : admissible_grid_shapes(n, bound_exponent)) {
    if (dx < shape.nx || dy < shape.ny) continue;
    std::vector<std::size_t> xc(shape.nx - 1);
    std::iota(xc.begin(), xc.end(), std::size_t{1});
    do {
      for (std::size_t g = 0, b = 0; g < dx; ++g) {
        while (b < xc.size() && xc[b] <= g) ++b;
        xbin[g] = b;
      }
      collapsed.assign(shape.nx * dy, 0);
      for (std::size_t g = 0; g < dx; ++g) {
        for (std::size_t h = 0; h < dy; ++h) collapsed[xbin[g] * dy + h] += joint[g * dy + h];
      }
      std::vector<std::size_t> yc(shape.ny - 1);
      std::iota(yc.begin(), yc.end(), std::size_t{1});
      do {
        for (std::size_t h = 0, b = 0; h < dy; ++h) {
          while (b < yc.size() && yc[b] <= h) ++b;
          ybin[h] = b;
        }
        table.assign(shape.nx * shape.ny, 0);
        for (std::size_t u = 0; u < shape.nx; ++u) {
          for (std::size_t h = 0; h < dy; ++h) {
            table[u * shape.ny + ybin[h]] += collapsed[u * dy + h];
          }
        }
        const double mi = mutual_information(table, shape.nx, shape.ny, terms, rs, cs);
        const double value = normalise(mi, shape.nx, shape.ny);
        if (value > best.value) {
          best.value = value;
          best.best_mi = mi;
          best.best_grid.x_cuts.clear();
          best.best_grid.y_cuts.clear();
          for (auto c : xc) best.best_grid.x_cuts.push_back(cut_between(gx.value[c - 1], gx.value[c]));
          for (auto c : yc) best.best_grid.y_cuts.push_back(cut_between(gy.value[c - 1], gy.value[c]));
        }
      } while (next_combination(yc, dy - 1));
    } while (next_combination(xc, dx - 1));
  }

  if (best.value < 0.0) return {0.0, fallback_grid(gx, gy), 0.0};
  return best;
}

struct ApproxMic::Workspace {
  std::size_t cached_n = 0;
  // (equipartition bin count q, largest optimised-axis bin count for that q)
  std::vector<std::pair<std::size_t, std::size_t>> plan;
  std::vector<double> nlogn;

  std::vector<std::uint32_t> order;
  RankGroups gx, gy;

  std::vector<int> group_label;   // equipartition label per b-axis group
  std::vector<int> hist;          // a-group x label counts
  std::vector<int> cum;           // cumulative clump counts, (m + 1) x q
  std::vector<int> cum_total;     // (m + 1)
  std::vector<std::size_t> clump_end;  // one past the last a-group of each clump
  std::vector<double> score;      // (kmax + 1) x (m + 1)
  std::vector<std::size_t> arg;   // (kmax + 1) x (m + 1)
  std::vector<std::size_t> bounds;
  std::vector<int> table;
  std::vector<double> terms, row_sum, col_sum;

  void prepare(std::size_t n, double exponent) {
    if (n == cached_n) return;
    cached_n = n;
    plan.clear();
    for (const auto& s : admissible_grid_shapes(n, exponent)) {
      auto it = std::find_if(plan.begin(), plan.end(),
                             [&](const auto& p) { return p.first == s.ny; });
      if (it == plan.end()) {
        plan.emplace_back(s.ny, s.nx);
      } else {
        it->second = std::max(it->second, s.nx);
      }
    }
    nlogn.resize(n + 1);
    nlogn[0] = 0.0;
    for (std::size_t c = 1; c <= n; ++c) {
      nlogn[c] = static_cast<double>(c) * std::log(static_cast<double>(c));
    }
  }
};

ApproxMic::ApproxMic(double bound_exponent)
    : bound_exponent_(bound_exponent), ws_(std::make_unique<Workspace>()) {}
ApproxMic::ApproxMic(const ApproxMic& other)
    : bound_exponent_(other.bound_exponent_), ws_(std::make_unique<Workspace>()) {}
ApproxMic& ApproxMic::operator=(const ApproxMic& other) {
  bound_exponent_ = other.bound_exponent_;
  ws_ = std::make_unique<Workspace>();
  return *this;
}
ApproxMic::ApproxMic(ApproxMic&&) noexcept = default;
ApproxMic& ApproxMic::operator=(ApproxMic&&) noexcept = default;
ApproxMic::~ApproxMic() = default;

namespace {

struct Candidate {
  double value = -1.0;
  double mi = 0.0;
  bool want_grid = false;
  GridPartition grid;
};

// Equipartitions axis `b` into q rank bins, optimises axis `a` by dynamic
// programming and offers every resulting grid to `best`. `a_is_x` orients the
// reported grid.
template <typename Ws>
void optimise_axis(Ws& ws, const RankGroups& ga, const RankGroups& gb, std::size_t n,
                   bool a_is_x, Candidate& best) {
  const std::size_t da = ga.count();
  const std::size_t db = gb.count();
  for (const auto& [q, maxk] : ws.plan) {
    // Ties share the bin of their lowest rank.
    ws.group_label.resize(db);
    int label = -1;
    std::size_t previous_raw = static_cast<std::size_t>(-1);
    for (std::size_t g = 0; g < db; ++g) {
      const std::size_t raw = static_cast<std::size_t>(gb.first[g]) * q / n;
      if (raw != previous_raw) {
        ++label;
        previous_raw = raw;
      }
      ws.group_label[g] = label;
    }
    const auto qe = static_cast<std::size_t>(label + 1);
    if (qe < 2) continue;

    ws.hist.assign(da * qe, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++ws.hist[ga.group_of[i] * qe + static_cast<std::size_t>(ws.group_label[gb.group_of[i]])];
    }

    // Clumps: runs of consecutive a-groups that all sit in one and the same
    // label are never split by an optimal partition.
    ws.cum.assign(qe, 0);
    ws.cum_total.assign(1, 0);
    ws.clump_end.clear();
    int run_label = -1;
    for (std::size_t g = 0; g < da; ++g) {
      const int* h = ws.hist.data() + g * qe;
      int pure = -1;
      int nonzero = 0;
      int total = 0;
      for (std::size_t l = 0; l < qe; ++l) {
        if (h[l] > 0) {
          ++nonzero;
          pure = static_cast<int>(l);
          total += h[l];
        }
      }
      if (nonzero != 1) pure = -1;
      const bool extend = !ws.clump_end.empty() && pure >= 0 && pure == run_label;
      if (!extend) {
        const std::size_t base = ws.cum.size() - qe;
        ws.cum.insert(ws.cum.end(), ws.cum.begin() + static_cast<std::ptrdiff_t>(base),
                      ws.cum.begin() + static_cast<std::ptrdiff_t>(base + qe));
        ws.cum_total.push_back(ws.cum_total.back());
        ws.clump_end.push_back(g + 1);
      } else {
        ws.clump_end.back() = g + 1;
      }
      int* row = ws.cum.data() + ws.cum.size() - qe;
      for (std::size_t l = 0; l < qe; ++l) row[l] += h[l];
      ws.cum_total.back() += total;
      run_label = pure;
    }
    const std::size_t m = ws.clump_end.size();
    if (m < 2) continue;
    const std::size_t kmax = std::min(maxk, m);

    // gain(s, t) = sum_l c_l log c_l - c log c for the points in clumps [s, t);
    // the sum of gains over a partition is n * (-H(label | bin)).
    auto gain = [&](std::size_t s, std::size_t t) {
      const int* hi = ws.cum.data() + t * qe;
      const int* lo = ws.cum.data() + s * qe;
      double g = -ws.nlogn[static_cast<std::size_t>(ws.cum_total[t] - ws.cum_total[s])];
      for (std::size_t l = 0; l < qe; ++l) g += ws.nlogn[static_cast<std::size_t>(hi[l] - lo[l])];
      return g;
    };
    const std::size_t stride = m + 1;
    ws.score.assign((kmax + 1) * stride, 0.0);
    ws.arg.assign((kmax + 1) * stride, 0);
    for (std::size_t t = 1; t <= m; ++t) ws.score[stride + t] = gain(0, t);
    for (std::size_t k = 2; k <= kmax; ++k) {
      // Only the last level needs the full extent of the axis; earlier levels
      // feed every later end point.
      const std::size_t t_begin = k == kmax ? m : k;
      for (std::size_t t = t_begin; t <= m; ++t) {
        double top = 0.0;
        std::size_t top_s = 0;
        bool first = true;
        for (std::size_t s = k - 1; s < t; ++s) {
          const double v = ws.score[(k - 1) * stride + s] + gain(s, t);
          if (first || v > top) {
            top = v;
            top_s = s;
            first = false;
          }
        }
        ws.score[k * stride + t] = top;
        ws.arg[k * stride + t] = top_s;
      }
    }
    // MI recovered from the DP score, used only to skip grids that cannot
    // beat the incumbent; accepted grids are re-scored from their counts.
    double label_term = ws.nlogn[n];
    for (std::size_t l = 0; l < qe; ++l) label_term -= ws.nlogn[static_cast<std::size_t>(ws.cum[m * qe + l])];
    for (std::size_t k = 2; k <= kmax; ++k) {
      const double estimate = (ws.score[k * stride + m] + label_term) / static_cast<double>(n);
      if (estimate / std::log(static_cast<double>(std::min(k, qe))) < best.value - 1e-9) continue;
      ws.bounds.assign(k + 1, 0);
      ws.bounds[k] = m;
      for (std::size_t kk = k, t = m; kk >= 2; --kk) {
        t = ws.arg[kk * stride + t];
        ws.bounds[kk - 1] = t;
      }
      ws.table.assign(k * qe, 0);
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t l = 0; l < qe; ++l) {
          ws.table[j * qe + l] =
              ws.cum[ws.bounds[j + 1] * qe + l] - ws.cum[ws.bounds[j] * qe + l];
        }
      }
      const double mi =
          mutual_information(ws.table, k, qe, ws.terms, ws.row_sum, ws.col_sum);
      const double value = normalise(mi, k, qe);
      if (value > best.value) {
        best.value = value;
        best.mi = mi;
        if (best.want_grid) {
          std::vector<double> a_cuts, b_cuts;
          for (std::size_t j = 1; j < k; ++j) {
            const std::size_t e = ws.clump_end[ws.bounds[j] - 1];
            a_cuts.push_back(cut_between(ga.value[e - 1], ga.value[e]));
          }
          for (std::size_t g = 1; g < db; ++g) {
            if (ws.group_label[g] != ws.group_label[g - 1]) {
              b_cuts.push_back(cut_between(gb.value[g - 1], gb.value[g]));
            }
          }
          best.grid = a_is_x ? GridPartition{a_cuts, b_cuts} : GridPartition{b_cuts, a_cuts};
        }
      }
    }
  }
}

}  // namespace

namespace {

template <typename Ws>
MicResult run_approx(Ws& ws, double bound_exponent, std::span<const double> xs,
                     std::span<const double> ys, bool want_grid) {
  validate(xs, ys);
  const std::size_t n = xs.size();
  ws.prepare(n, bound_exponent);
  build_rank_groups(xs, ws.order, ws.gx);
  build_rank_groups(ys, ws.order, ws.gy);
  if (ws.gx.count() < 2 || ws.gy.count() < 2) {
    if (!want_grid) return {};
    return {0.0, fallback_grid(ws.gx, ws.gy), 0.0};
  }
  Candidate best;
  best.want_grid = want_grid;
  optimise_axis(ws, ws.gx, ws.gy, n, true, best);
  optimise_axis(ws, ws.gy, ws.gx, n, false, best);
  if (best.value < 0.0) {
    if (!want_grid) return {};
    return {0.0, fallback_grid(ws.gx, ws.gy), 0.0};
  }
  return {best.value, std::move(best.grid), best.mi};
}

}  // namespace

MicResult ApproxMic::solve(std::span<const double> xs, std::span<const double> ys) {
  return run_approx(*ws_, bound_exponent_, xs, ys, true);
}

double ApproxMic::operator()(std::span<const double> xs, std::span<const double> ys) {
  return run_approx(*ws_, bound_exponent_, xs, ys, false).value;
}

MicResult approx_mic(const SamplePairs& samples, double bound_exponent) {
  ApproxMic estimator(bound_exponent);
  return estimator.solve(samples.xs(), samples.ys());
}

}  // namespace smicqa::mic
