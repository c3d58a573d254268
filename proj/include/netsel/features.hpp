#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "netsel/csv.hpp"
#include "netsel/error.hpp"

namespace netsel {

// 8-bit RGB raster, row-major triples.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage(int w, int h, std::vector<std::uint8_t> data)
      : width(w), height(h), pixels(std::move(data)) {
    if (width <= 0 || height <= 0)
      fail(errc::degenerate_image, "raster must have at least one pixel");
    if (pixels.size() != static_cast<std::size_t>(width) * height * 3)
      fail(errc::degenerate_image, "raster buffer is not 3*width*height bytes");
  }

  const std::uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Extraction thresholds. Defaults are common literature values; all are
// overridable from the CLI / config file.
struct FeatureConfig {
  double edge_threshold = 0.25;    // fraction of the maximum Sobel magnitude
  double peak_min_level = 0.5;     // fraction of 255
  double harris_k = 0.04;
  double harris_threshold = 0.01;  // fraction of the maximum Harris response
};

// ITU-R BT.601 luma, rounded to 8 bits.
inline GrayImage to_grayscale(const RasterImage& img) {
  GrayImage g;
  g.width = img.width;
  g.height = img.height;
  g.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    const std::uint8_t* p = &img.pixels[i * 3];
    const double y = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    g.pixels[i] = static_cast<std::uint8_t>(std::lround(y));
  }
  return g;
}

struct GlcmFeatures {
  double contrast = 0;
  double dissimilarity = 0;
  double homogeneity = 0;
  double angular_second_moment = 0;
  double energy = 0;
  double correlation = 0;
};

// Gray-level co-occurrence features: 8 quantization levels, offset (1, 0),
// symmetrized and normalized. Correlation is defined as 1 when the marginal
// deviation vanishes (constant image).
inline GlcmFeatures glcm_features(const GrayImage& gray) {
  if (gray.width < 2) fail(errc::degenerate_image, "GLCM needs width >= 2");

  std::array<std::array<std::uint64_t, 8>, 8> counts{};
  for (int y = 0; y < gray.height; ++y) {
    for (int x = 0; x + 1 < gray.width; ++x) {
      const int i = gray.at(x, y) >> 5;
      const int j = gray.at(x + 1, y) >> 5;
      ++counts[i][j];
      ++counts[j][i];
    }
  }
  const double total = 2.0 * gray.height * (gray.width - 1);

  GlcmFeatures f;
  std::array<double, 8> marginal{};
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const double p = counts[i][j] / total;
      const double d = i - j;
      f.contrast += p * d * d;
      f.dissimilarity += p * std::abs(d);
      f.homogeneity += p / (1.0 + d * d);
      f.angular_second_moment += p * p;
      marginal[i] += p;
    }
  }
  f.energy = std::sqrt(f.angular_second_moment);

  double mu = 0;
  for (int i = 0; i < 8; ++i) mu += i * marginal[i];
  double var = 0;
  for (int i = 0; i < 8; ++i) var += (i - mu) * (i - mu) * marginal[i];
  if (var == 0) {
    f.correlation = 1.0;
  } else {
    double cov = 0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) cov += (counts[i][j] / total) * (i - mu) * (j - mu);
    f.correlation = cov / var;
  }
  return f;
}

struct HistogramFeatures {
  std::array<double, 4> hue{};
  std::array<double, 4> saturation{};
  std::array<double, 4> brightness{};
  std::array<double, 8> red{};
  std::array<double, 8> green{};
  std::array<double, 8> blue{};
};

// HSV and per-channel color histograms, each L1-normalized. Achromatic pixels
// land in hue bin 0 (their hue is 0 by convention).
inline HistogramFeatures histogram_features(const RasterImage& img) {
  HistogramFeatures f;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = &img.pixels[i * 3];
    const double r = p[0] / 255.0, g = p[1] / 255.0, b = p[2] / 255.0;
    const double cmax = std::max({r, g, b});
    const double cmin = std::min({r, g, b});
    const double delta = cmax - cmin;
    double h = 0;
    if (delta > 0) {
      if (cmax == r)
        h = 60.0 * std::fmod((g - b) / delta, 6.0);
      else if (cmax == g)
        h = 60.0 * ((b - r) / delta + 2.0);
      else
        h = 60.0 * ((r - g) / delta + 4.0);
      if (h < 0) h += 360.0;
      if (h >= 360.0) h -= 360.0;
    }
    const double s = cmax == 0 ? 0.0 : delta / cmax;
    ++f.hue[std::min(3, static_cast<int>(h / 90.0))];
    ++f.saturation[std::min(3, static_cast<int>(s * 4.0))];
    ++f.brightness[std::min(3, static_cast<int>(cmax * 4.0))];
    ++f.red[p[0] >> 5];
    ++f.green[p[1] >> 5];
    ++f.blue[p[2] >> 5];
  }
  const auto normalize = [n](auto& hist) {
    for (auto& v : hist) v /= static_cast<double>(n);
  };
  normalize(f.hue);
  normalize(f.saturation);
  normalize(f.brightness);
  normalize(f.red);
  normalize(f.green);
  normalize(f.blue);
  return f;
}

namespace detail {

// Sobel gradients on interior pixels; borders stay zero.
struct SobelField {
  int width = 0;
  int height = 0;
  std::vector<double> gx, gy;

  double x(int c, int r) const { return gx[static_cast<std::size_t>(r) * width + c]; }
  double y(int c, int r) const { return gy[static_cast<std::size_t>(r) * width + c]; }
};

inline SobelField sobel(const GrayImage& g) {
  SobelField f;
  f.width = g.width;
  f.height = g.height;
  f.gx.assign(static_cast<std::size_t>(g.width) * g.height, 0.0);
  f.gy.assign(static_cast<std::size_t>(g.width) * g.height, 0.0);
  for (int r = 1; r + 1 < g.height; ++r) {
    for (int c = 1; c + 1 < g.width; ++c) {
      const double gx = (g.at(c + 1, r - 1) + 2.0 * g.at(c + 1, r) + g.at(c + 1, r + 1)) -
                        (g.at(c - 1, r - 1) + 2.0 * g.at(c - 1, r) + g.at(c - 1, r + 1));
      const double gy = (g.at(c - 1, r + 1) + 2.0 * g.at(c, r + 1) + g.at(c + 1, r + 1)) -
                        (g.at(c - 1, r - 1) + 2.0 * g.at(c, r - 1) + g.at(c + 1, r - 1));
      f.gx[static_cast<std::size_t>(r) * g.width + c] = gx;
      f.gy[static_cast<std::size_t>(r) * g.width + c] = gy;
    }
  }
  return f;
}

// Largest magnitude a 3x3 Sobel kernel can produce on 8-bit input.
inline constexpr double kMaxSobelComponent = 4.0 * 255.0;
inline const double kMaxSobelMagnitude = kMaxSobelComponent * std::numbers::sqrt2;

}  // namespace detail

struct GradientFeatures {
  std::size_t n_edge_pixels = 0;
  std::array<double, 8> hog{};  // orientation bins over [0, 180)
};

// Edge count and magnitude-weighted orientation histogram from 3x3 Sobel
// gradients. A uniform histogram stands in when there is no gradient at all.
inline GradientFeatures gradient_features(const GrayImage& gray,
                                          const FeatureConfig& cfg = {}) {
  if (gray.width < 3 || gray.height < 3)
    fail(errc::degenerate_image, "gradient features need width and height >= 3");
  const detail::SobelField f = detail::sobel(gray);
  GradientFeatures out;
  const double edge_cut = cfg.edge_threshold * detail::kMaxSobelMagnitude;
  double total = 0;
  for (int r = 1; r + 1 < gray.height; ++r) {
    for (int c = 1; c + 1 < gray.width; ++c) {
      const double gx = f.x(c, r), gy = f.y(c, r);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag > edge_cut) ++out.n_edge_pixels;
      if (mag == 0) continue;
      double theta = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (theta < 0) theta += 180.0;
      if (theta >= 180.0) theta -= 180.0;
      out.hog[std::min(7, static_cast<int>(theta / 22.5))] += mag;
      total += mag;
    }
  }
  if (total == 0) {
    out.hog.fill(1.0 / 8.0);
  } else {
    for (auto& v : out.hog) v /= total;
  }
  return out;
}

// Strict 3x3 local maxima at or above the brightness cut.
inline std::size_t count_peaks(const GrayImage& gray, const FeatureConfig& cfg = {}) {
  if (gray.width < 3 || gray.height < 3)
    fail(errc::degenerate_image, "peak counting needs width and height >= 3");
  const double level_cut = cfg.peak_min_level * 255.0;
  std::size_t peaks = 0;
  for (int r = 1; r + 1 < gray.height; ++r) {
    for (int c = 1; c + 1 < gray.width; ++c) {
      const int v = gray.at(c, r);
      if (v < level_cut) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr)
        for (int dc = -1; dc <= 1 && is_max; ++dc)
          if (dr != 0 || dc != 0) is_max = gray.at(c + dc, r + dr) < v;
      if (is_max) ++peaks;
    }
  }
  return peaks;
}

// Harris corner response over a flat 3x3 window. A corner is a strict 3x3
// local maximum of the response above the configured fraction of the global
// maximum; the suppression collapses each corner cluster to one count (a
// clean rectangle reports 4).
inline std::size_t count_corners(const GrayImage& gray, const FeatureConfig& cfg = {}) {
  if (gray.width < 3 || gray.height < 3)
    fail(errc::degenerate_image, "corner counting needs width and height >= 3");
  const detail::SobelField f = detail::sobel(gray);
  const int w = gray.width, h = gray.height;
  std::vector<double> response(static_cast<std::size_t>(w) * h, 0.0);
  double max_response = 0;
  for (int r = 1; r + 1 < h; ++r) {
    for (int c = 1; c + 1 < w; ++c) {
      double sxx = 0, syy = 0, sxy = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const double gx = f.x(c + dc, r + dr), gy = f.y(c + dc, r + dr);
          sxx += gx * gx;
          syy += gy * gy;
          sxy += gx * gy;
        }
      }
      const double det = sxx * syy - sxy * sxy;
      const double trace = sxx + syy;
      response[static_cast<std::size_t>(r) * w + c] = det - cfg.harris_k * trace * trace;
      max_response = std::max(max_response, response[static_cast<std::size_t>(r) * w + c]);
    }
  }
  if (max_response <= 0) return 0;
  const double cut = cfg.harris_threshold * max_response;
  std::size_t corners = 0;
  for (int r = 1; r + 1 < h; ++r) {
    for (int c = 1; c + 1 < w; ++c) {
      const double resp = response[static_cast<std::size_t>(r) * w + c];
      if (resp <= cut) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr)
        for (int dc = -1; dc <= 1 && is_max; ++dc)
          if (dr != 0 || dc != 0)
            is_max = response[static_cast<std::size_t>(r + dr) * w + (c + dc)] < resp;
      if (is_max) ++corners;
    }
  }
  return corners;
}

inline constexpr std::size_t kFeatureCount = 56;

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  static const std::array<std::string, kFeatureCount>& names() {
    static const std::array<std::string, kFeatureCount> n = [] {
      std::array<std::string, kFeatureCount> out;
      std::size_t i = 0;
      for (const char* s : {"mean", "variance", "glcm_contrast", "glcm_dissimilarity",
                            "glcm_homogeneity", "glcm_asm", "glcm_energy", "glcm_correlation",
                            "n_peaks", "n_corners", "n_edge_pixels", "aspect_ratio"})
        out[i++] = s;
      const auto histogram = [&](const char* prefix, int bins) {
        for (int b = 0; b < bins; ++b) out[i++] = std::string(prefix) + std::to_string(b);
      };
      histogram("hue_hist_", 4);
      histogram("sat_hist_", 4);
      histogram("brightness_hist_", 4);
      histogram("r_hist_", 8);
      histogram("g_hist_", 8);
      histogram("b_hist_", 8);
      histogram("hog_", 8);
      return out;
    }();
    return n;
  }
};

// The full descriptor in declared order. Mean and variance are over the
// grayscale raster; both use exact integer accumulation, so the result does
// not depend on pixel visit order.
inline FeatureVector extract_all(const RasterImage& img, const FeatureConfig& cfg = {}) {
  if (img.width < 3 || img.height < 3)
    fail(errc::degenerate_image, "feature extraction needs width and height >= 3");
  const GrayImage gray = to_grayscale(img);

  std::uint64_t sum = 0, sum_sq = 0;
  for (const std::uint8_t v : gray.pixels) {
    sum += v;
    sum_sq += static_cast<std::uint64_t>(v) * v;
  }
  const double n = static_cast<double>(gray.pixels.size());
  const double mean = static_cast<double>(sum) / n;
  const double variance =
      (static_cast<double>(sum_sq) - static_cast<double>(sum) * static_cast<double>(sum) / n) / n;

  const GlcmFeatures glcm = glcm_features(gray);
  const HistogramFeatures hist = histogram_features(img);
  const GradientFeatures grad = gradient_features(gray, cfg);

  FeatureVector v;
  std::size_t i = 0;
  v.values[i++] = mean;
  v.values[i++] = variance;
  v.values[i++] = glcm.contrast;
  v.values[i++] = glcm.dissimilarity;
  v.values[i++] = glcm.homogeneity;
  v.values[i++] = glcm.angular_second_moment;
  v.values[i++] = glcm.energy;
  v.values[i++] = glcm.correlation;
  v.values[i++] = static_cast<double>(count_peaks(gray, cfg));
  v.values[i++] = static_cast<double>(count_corners(gray, cfg));
  v.values[i++] = static_cast<double>(grad.n_edge_pixels);
  v.values[i++] = static_cast<double>(img.width) / static_cast<double>(img.height);
  for (const double x : hist.hue) v.values[i++] = x;
  for (const double x : hist.saturation) v.values[i++] = x;
  for (const double x : hist.brightness) v.values[i++] = x;
  for (const double x : hist.red) v.values[i++] = x;
  for (const double x : hist.green) v.values[i++] = x;
  for (const double x : hist.blue) v.values[i++] = x;
  for (const double x : grad.hog) v.values[i++] = x;
  return v;
}

// --- feature table --------------------------------------------------------

inline void save_feature_table(const std::vector<std::pair<std::int64_t, FeatureVector>>& rows,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << "image_id";
  for (const auto& name : FeatureVector::names()) out << ',' << name;
  out << '\n';
  for (const auto& [id, v] : rows) {
    out << id;
    for (const double x : v.values) out << ',' << csv::fmt(x);
    out << '\n';
  }
}

inline std::vector<std::pair<std::int64_t, FeatureVector>> load_feature_table(
    const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) fail(errc::malformed_file, path + ": missing header");
  const auto& header = rows.front();
  if (header.size() != kFeatureCount + 1 || header[0] != "image_id")
    fail(errc::malformed_file, path + ": expected image_id plus " +
                                   std::to_string(kFeatureCount) + " feature columns");
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (header[i + 1] != FeatureVector::names()[i])
      fail(errc::malformed_file,
           path + ": feature column '" + header[i + 1] + "' out of order");
  std::vector<std::pair<std::int64_t, FeatureVector>> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + " row " + std::to_string(r);
    if (row.size() != kFeatureCount + 1)
      fail(errc::malformed_file, where + ": wrong field count");
    FeatureVector v;
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      v.values[i] = csv::parse_double(row[i + 1], where);
    out.emplace_back(csv::parse_int(row[0], where), v);
  }
  return out;
}

}  // namespace netsel
