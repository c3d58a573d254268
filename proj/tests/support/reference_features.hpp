#pragma once

// Naive reference loops for the texture/gradient kernels, independent of
// netsel/features.hpp. Kernels are spelled out as coefficient tables and the
// GLCM correlation uses the E[ij] product-moment form instead of the centered
// sum, so agreement is a real cross-check.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "netsel/features.hpp"

namespace reffeat {

struct RefGlcm {
  double contrast = 0, dissimilarity = 0, homogeneity = 0;
  double asm_value = 0, energy = 0, correlation = 0;
};

inline RefGlcm ref_glcm(const netsel::GrayImage& g) {
  double p[8][8] = {};
  double total = 0;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x + 1 < g.width; ++x) {
      const int a = g.at(x, y) / 32;
      const int b = g.at(x + 1, y) / 32;
      p[a][b] += 1;
      p[b][a] += 1;
      total += 2;
    }
  }
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) p[i][j] /= total;

  RefGlcm f;
  double mean_i = 0, mean_j = 0, e_ij = 0;
  double var_i = 0, var_j = 0;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      f.contrast += p[i][j] * (i - j) * (i - j);
      f.dissimilarity += p[i][j] * std::abs(i - j);
      f.homogeneity += p[i][j] / (1.0 + (i - j) * (i - j));
      f.asm_value += p[i][j] * p[i][j];
      mean_i += i * p[i][j];
      mean_j += j * p[i][j];
      e_ij += static_cast<double>(i) * j * p[i][j];
    }
  }
  f.energy = std::sqrt(f.asm_value);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      var_i += (i - mean_i) * (i - mean_i) * p[i][j];
      var_j += (j - mean_j) * (j - mean_j) * p[i][j];
    }
  const double denom = std::sqrt(var_i) * std::sqrt(var_j);
  f.correlation = denom == 0 ? 1.0 : (e_ij - mean_i * mean_j) / denom;
  return f;
}

inline void ref_sobel_at(const netsel::GrayImage& g, int x, int y, double& gx, double& gy) {
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  gx = 0;
  gy = 0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      gx += kx[dy + 1][dx + 1] * static_cast<double>(g.at(x + dx, y + dy));
      gy += ky[dy + 1][dx + 1] * static_cast<double>(g.at(x + dx, y + dy));
    }
}

struct RefGradient {
  std::size_t edges = 0;
  std::array<double, 8> hog{};
};

inline RefGradient ref_gradient(const netsel::GrayImage& g, double edge_fraction) {
  RefGradient out;
  const double max_mag = std::sqrt(2.0) * 4.0 * 255.0;
  double total = 0;
  for (int y = 1; y + 1 < g.height; ++y) {
    for (int x = 1; x + 1 < g.width; ++x) {
      double gx, gy;
      ref_sobel_at(g, x, y, gx, gy);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag > edge_fraction * max_mag) ++out.edges;
      if (mag == 0) continue;
      double deg = std::atan2(gy, gx) / std::numbers::pi * 180.0;
      if (deg < 0) deg += 180.0;
      if (deg >= 180.0) deg -= 180.0;
      int bin = static_cast<int>(deg / 22.5);
      if (bin > 7) bin = 7;
      out.hog[bin] += mag;
      total += mag;
    }
  }
  if (total == 0)
    out.hog.fill(0.125);
  else
    for (auto& v : out.hog) v /= total;
  return out;
}

inline std::size_t ref_peaks(const netsel::GrayImage& g, double level_fraction) {
  std::size_t count = 0;
  for (int y = 1; y + 1 < g.height; ++y) {
    for (int x = 1; x + 1 < g.width; ++x) {
      if (g.at(x, y) < level_fraction * 255.0) continue;
      bool strict_max = true;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (g.at(x + dx, y + dy) >= g.at(x, y)) strict_max = false;
        }
      if (strict_max) ++count;
    }
  }
  return count;
}

inline std::size_t ref_harris(const netsel::GrayImage& g, double k, double threshold_fraction) {
  const int w = g.width, h = g.height;
  std::vector<double> gx(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<double> gy(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 1; y + 1 < h; ++y)
    for (int x = 1; x + 1 < w; ++x)
      ref_sobel_at(g, x, y, gx[static_cast<std::size_t>(y) * w + x],
                   gy[static_cast<std::size_t>(y) * w + x]);

  std::vector<double> resp(static_cast<std::size_t>(w) * h, 0.0);
  double max_resp = 0;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      double a = 0, b = 0, c = 0;  // [a c; c b]
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const double ix = gx[static_cast<std::size_t>(y + dy) * w + (x + dx)];
          const double iy = gy[static_cast<std::size_t>(y + dy) * w + (x + dx)];
          a += ix * ix;
          b += iy * iy;
          c += ix * iy;
        }
      const double r = (a * b - c * c) - k * (a + b) * (a + b);
      resp[static_cast<std::size_t>(y) * w + x] = r;
      if (r > max_resp) max_resp = r;
    }
  }
  if (max_resp <= 0) return 0;
  std::size_t count = 0;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const double r = resp[static_cast<std::size_t>(y) * w + x];
      if (r <= threshold_fraction * max_resp) continue;
      bool strict_max = true;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (resp[static_cast<std::size_t>(y + dy) * w + (x + dx)] >= r) strict_max = false;
        }
      if (strict_max) ++count;
    }
  }
  return count;
}

}  // namespace reffeat
