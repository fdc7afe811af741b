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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace oracle {

namespace {

std::size_t bin_of(double v, const std::vector<double>& cuts) {
  std::size_t b = 0;
  while (b < cuts.size() && v >= cuts[b]) ++b;
  return b;
}

std::vector<double> midpoints(const std::vector<double>& v) {
  std::vector<double> s(v);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) out.push_back(s[i] + (s[i + 1] - s[i]) / 2.0);
  return out;
}

// Calls f on every k-subset of `items` (kept in order).
void subsets(const std::vector<double>& items, std::size_t k,
             const std::function<void(const std::vector<double>&)>& f) {
  std::vector<double> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == k) {
      f(pick);
      return;
    }
    for (std::size_t i = start; i < items.size(); ++i) {
      pick.push_back(items[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

}  // namespace

double mutual_information(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& x_cuts, const std::vector<double>& y_cuts) {
  const std::size_t nx = x_cuts.size() + 1;
  const std::size_t ny = y_cuts.size() + 1;
  std::vector<std::vector<double>> joint(nx, std::vector<double>(ny, 0.0));
  std::vector<double> px(nx, 0.0), py(ny, 0.0);
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto a = bin_of(xs[i], x_cuts);
    const auto b = bin_of(ys[i], y_cuts);
    joint[a][b] += 1.0 / n;
    px[a] += 1.0 / n;
    py[b] += 1.0 / n;
  }
  double mi = 0.0;
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) {
      if (joint[a][b] > 0.0) mi += joint[a][b] * std::log(joint[a][b] / (px[a] * py[b]));
    }
  }
  return mi;
}

double brute_force_mic(const std::vector<double>& xs, const std::vector<double>& ys, double alpha) {
  const double bound = std::pow(static_cast<double>(xs.size()), alpha);
  std::vector<std::pair<std::size_t, std::size_t>> shapes{{2, 2}};
  for (std::size_t nx = 2; nx < 64; ++nx) {
    for (std::size_t ny = 2; ny < 64; ++ny) {
      if (static_cast<double>(nx * ny) < bound && !(nx == 2 && ny == 2)) shapes.emplace_back(nx, ny);
    }
  }
  const auto mx = midpoints(xs);
  const auto my = midpoints(ys);
  double best = 0.0;
  for (const auto& [nx, ny] : shapes) {
    if (mx.size() < nx - 1 || my.size() < ny - 1) continue;
    const double norm = std::log(static_cast<double>(std::min(nx, ny)));
    subsets(mx, nx - 1, [&](const std::vector<double>& xc) {
      subsets(my, ny - 1, [&](const std::vector<double>& yc) {
        best = std::max(best, mutual_information(xs, ys, xc, yc) / norm);
      });
    });
  }
  return std::min(best, 1.0);
}

std::vector<double> project(const smicqa::FeatureMap& patch, const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t y = 0; y < patch.height(); ++y) {
    for (std::size_t x = 0; x < patch.width(); ++x) {
      double acc = 0.0;
      for (std::size_t c = 0; c < patch.channels(); ++c) acc += patch(y, x, c) * v[c];
      out.push_back(acc);
    }
  }
  return out;
}

double mse(const smicqa::ImagePlane& a, const smicqa::ImagePlane& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.values().size());
}

smicqa::Grid ssim_map(const smicqa::ImagePlane& a, const smicqa::ImagePlane& b) {
  auto luma = [](const smicqa::ImagePlane& im, std::size_t y, std::size_t x) {
    if (im.channels() == 1) return im(y, x, 0);
    return std::clamp(0.299 * im(y, x, 0) + 0.587 * im(y, x, 1) + 0.114 * im(y, x, 2), 0.0, 1.0);
  };
  double w[11][11];
  double total = 0.0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      w[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2.0 * 1.5 * 1.5));
      total += w[i][j];
    }
  }
  const double c1 = 1e-4, c2 = 9e-4;
  smicqa::Grid out(a.height() - 10, a.width() - 10);
  for (std::size_t y = 0; y + 11 <= a.height(); ++y) {
    for (std::size_t x = 0; x + 11 <= a.width(); ++x) {
      double ma = 0, mb = 0, aa = 0, bb = 0, ab = 0;
      for (int i = 0; i < 11; ++i) {
        for (int j = 0; j < 11; ++j) {
          const double wt = w[i][j] / total;
          const double va = luma(a, y + i, x + j);
          const double vb = luma(b, y + i, x + j);
          ma += wt * va;
          mb += wt * vb;
          aa += wt * va * va;
          bb += wt * vb * vb;
          ab += wt * va * vb;
        }
      }
      const double va = aa - ma * ma, vb = bb - mb * mb, cov = ab - ma * mb;
      out(y, x) = ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  }
  return out;
}

double ssim(const smicqa::ImagePlane& a, const smicqa::ImagePlane& b) {
  const auto m = ssim_map(a, b);
  double sum = 0.0;
  for (double v : m.values()) sum += v;
  return sum / static_cast<double>(m.size());
}

smicqa::Grid deep_map(const smicqa::FeatureMap& a, const smicqa::FeatureMap& b, std::size_t patch,
                      std::size_t stride, bool normalize) {
  const std::size_t rows = (a.height() - patch) / stride + 1;
  const std::size_t cols = (a.width() - patch) / stride + 1;
  smicqa::Grid out(rows, cols);
  auto unit = [&](const smicqa::FeatureMap& f, std::size_t y, std::size_t x, std::size_t c) {
    const double v = f(y, x, c);
    if (!normalize) return v;
    double norm = 0.0;
    for (std::size_t k = 0; k < f.channels(); ++k) norm += static_cast<double>(f(y, x, k)) * f(y, x, k);
    return v / (std::sqrt(norm) + 1e-10);
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::size_t y = r * stride; y < r * stride + patch; ++y) {
        for (std::size_t x = c * stride; x < c * stride + patch; ++x) {
          for (std::size_t k = 0; k < a.channels(); ++k) {
            const double d = unit(a, y, x, k) - unit(b, y, x, k);
            acc += d * d;
          }
        }
      }
      out(r, c) = acc / static_cast<double>(patch * patch);
    }
  }
  return out;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double u : v) {
      if (u < v[i]) less += 1;
      if (u == v[i]) equal += 1;
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  const double ma = sa / n, mb = sb / n;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(ranks(a), ranks(b));
}

double bilinear_at(const smicqa::Grid& g, double r, double c) {
  const auto r0 = static_cast<std::size_t>(std::floor(r));
  const auto c0 = static_cast<std::size_t>(std::floor(c));
  const std::size_t r1 = std::min(r0 + 1, g.rows() - 1);
  const std::size_t c1 = std::min(c0 + 1, g.cols() - 1);
  const double fr = r - static_cast<double>(r0);
  const double fc = c - static_cast<double>(c0);
  return (1 - fr) * (1 - fc) * g(r0, c0) + (1 - fr) * fc * g(r0, c1) + fr * (1 - fc) * g(r1, c0) +
         fr * fc * g(r1, c1);
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

smicqa::FeatureMap random_features(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) {
  const auto v = normals(h * w * c, seed);
  return smicqa::FeatureMap(h, w, c, std::vector<float>(v.begin(), v.end()));
}

smicqa::ImagePlane random_image(std::size_t w, std::size_t h, std::size_t channels,
                                std::uint64_t seed) {
  return smicqa::ImagePlane(w, h, channels, uniforms(w * h * channels, seed));
}

smicqa::ImagePlane noisy_copy(const smicqa::ImagePlane& ref, double amplitude, std::uint64_t seed) {
  const auto noise = uniforms(ref.values().size(), seed);
  std::vector<double> out(ref.values().begin(), ref.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i] + amplitude * (2.0 * noise[i] - 1.0), 0.0, 1.0);
  }
  return smicqa::ImagePlane(ref.width(), ref.height(), ref.channels(), std::move(out));
}

smicqa::ImagePlane smooth_image(std::size_t w, std::size_t h, std::size_t channels,
                                std::uint64_t seed) {
  const auto phase = uniforms(12, seed);
  std::vector<double> out(w * h * channels);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double fx = static_cast<double>(x) / static_cast<double>(w);
        const double fy = static_cast<double>(y) / static_cast<double>(h);
        double v = 0.5 + 0.2 * std::sin(6.28318 * (2 * fx + phase[c])) +
                   0.15 * std::cos(6.28318 * (3 * fy + phase[3 + c])) +
                   0.1 * std::sin(6.28318 * (5 * (fx + fy) + phase[6 + c]));
        out[(y * w + x) * channels + c] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return smicqa::ImagePlane(w, h, channels, std::move(out));
}

}  // namespace oracle
