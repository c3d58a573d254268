#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "netsel/error.hpp"

namespace netsel {

namespace detail {

// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
// Returns eigenvalues descending with matching column eigenvectors; plenty for
// the 56x56 covariance matrices this toolkit sees.
struct EigenResult {
  std::vector<double> values;                 // descending
  std::vector<std::vector<double>> vectors;   // vectors[i] pairs with values[i]
};

inline EigenResult jacobi_eigen_symmetric(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });

  EigenResult result;
  result.values.resize(n);
  result.vectors.assign(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    result.values[i] = a[order[i]][order[i]];
    for (std::size_t k = 0; k < n; ++k) result.vectors[i][k] = v[k][order[i]];
  }
  return result;
}

}  // namespace detail

// Standardization plus orthonormal projection. Zero-variance features map to
// zero after standardization instead of dividing by zero.
struct PcaModel {
  std::vector<double> means;
  std::vector<double> stdevs;                    // 0 marks a constant feature
  std::vector<std::vector<double>> components;   // k rows of dimension d
  std::vector<double> explained_variance_ratio;  // k entries, non-increasing

  std::size_t n_components() const { return components.size(); }
  std::size_t dimension() const { return means.size(); }
};

// Fits standardize -> eigendecompose-covariance, retaining components until
// the cumulative explained variance reaches `variance_target` (a target of 1
// keeps every component).
inline PcaModel pca_fit(const std::vector<std::vector<double>>& rows, double variance_target) {
  if (rows.size() < 2) fail(errc::degenerate_corpus, "PCA needs at least 2 rows");
  if (!(variance_target > 0) || variance_target > 1.0)
    fail(errc::invalid_argument, "variance target must be in (0, 1]");
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != d) fail(errc::degenerate_corpus, "ragged feature rows");

  PcaModel model;
  model.means.assign(d, 0.0);
  model.stdevs.assign(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) model.means[j] += r[j];
  for (auto& m : model.means) m /= static_cast<double>(n);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = r[j] - model.means[j];
      model.stdevs[j] += dv * dv;
    }
  for (auto& s : model.stdevs) s = std::sqrt(s / static_cast<double>(n));

  // Standardized data, then covariance with the usual n-1 normalization.
  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      z[i][j] = model.stdevs[j] == 0 ? 0.0 : (rows[i][j] - model.means[j]) / model.stdevs[j];

  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      if (z[i][a] == 0.0) continue;
      for (std::size_t b = a; b < d; ++b) cov[a][b] += z[i][a] * z[i][b];
    }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov[a][b] /= static_cast<double>(n - 1);
      cov[b][a] = cov[a][b];
    }

  detail::EigenResult eig = detail::jacobi_eigen_symmetric(std::move(cov));
  for (auto& v : eig.values) v = std::max(v, 0.0);
  const double total = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  if (total == 0) fail(errc::degenerate_corpus, "all features are constant");

  std::size_t keep = eig.values.size();
  if (variance_target < 1.0) {
    double cumulative = 0;
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
      cumulative += eig.values[i] / total;
      if (cumulative >= variance_target) {
        keep = i + 1;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < keep; ++i) {
    auto& comp = eig.vectors[i];
    // Deterministic sign: the largest-magnitude coefficient is positive.
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::abs(comp[j]) > std::abs(comp[arg])) arg = j;
    if (comp[arg] < 0)
      for (auto& c : comp) c = -c;
    model.components.push_back(std::move(comp));
    model.explained_variance_ratio.push_back(eig.values[i] / total);
  }
  return model;
}

inline std::vector<double> pca_transform(const PcaModel& model, const std::vector<double>& row) {
  if (row.size() != model.dimension())
    fail(errc::invalid_argument, "feature dimension does not match the PCA model");
  std::vector<double> z(row.size());
  for (std::size_t j = 0; j < row.size(); ++j)
    z[j] = model.stdevs[j] == 0 ? 0.0 : (row[j] - model.means[j]) / model.stdevs[j];
  std::vector<double> out(model.n_components(), 0.0);
  for (std::size_t i = 0; i < model.n_components(); ++i) {
    double dot = 0;
    for (std::size_t j = 0; j < z.size(); ++j) dot += model.components[i][j] * z[j];
    out[i] = dot;
  }
  return out;
}

// Back-projection into standardized space (used to check reconstruction).
inline std::vector<double> pca_reconstruct_standardized(const PcaModel& model,
                                                        const std::vector<double>& reduced) {
  std::vector<double> z(model.dimension(), 0.0);
  for (std::size_t i = 0; i < model.n_components(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j) z[j] += reduced[i] * model.components[i][j];
  return z;
}

inline std::vector<double> standardize(const PcaModel& model, const std::vector<double>& row) {
  std::vector<double> z(row.size());
  for (std::size_t j = 0; j < row.size(); ++j)
    z[j] = model.stdevs[j] == 0 ? 0.0 : (row[j] - model.means[j]) / model.stdevs[j];
  return z;
}

}  // namespace netsel
