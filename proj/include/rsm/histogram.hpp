#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsm/errors.hpp"

namespace rsm {

/// Equal-width binned density estimate. `density[k]` is count_k / (n_samples * width_k),
/// so sum(density * width) == 1 when `normalized` is set.
struct Histogram {
  std::vector<double> edges;    // n_bins + 1, strictly increasing
  std::vector<double> density;  // n_bins
  std::uint64_t n_samples = 0;
  bool normalized = false;

  std::size_t n_bins() const noexcept { return density.size(); }
  double width(std::size_t k) const { return edges[k + 1] - edges[k]; }
  double midpoint(std::size_t k) const { return 0.5 * (edges[k] + edges[k + 1]); }

  /// Probability mass of bin k.
  double mass(std::size_t k) const { return density[k] * width(k); }

  double total_mass() const {
    double m = 0.0;
    for (std::size_t k = 0; k < n_bins(); ++k) m += mass(k);
    return m;
  }

  double peak_density() const {
    return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
  }
};

/// Smallest bin width relative to max(1, |centre|); keeps degenerate (constant) data in one bin.
inline constexpr double kMinRelativeBinWidth = 1e-9;

/// Fixed-edge bin counter. Counters with identical edges merge associatively.
class BinCounter {
 public:
  explicit BinCounter(std::vector<double> edges) : edges_(std::move(edges)), counts_(edges_.size() - 1, 0) {
    if (edges_.size() < 2) throw ConfigError("histogram needs at least one bin");
    for (std::size_t k = 0; k + 1 < edges_.size(); ++k)
      if (!(edges_[k] < edges_[k + 1])) throw ConfigError("histogram edges must be strictly increasing");
  }

  /// Samples outside [first edge, last edge] are a contract violation.
  void add(double x) {
    if (!(x >= edges_.front() && x <= edges_.back()))
      throw std::out_of_range("sample outside histogram range");
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    auto k = static_cast<std::size_t>(it - edges_.begin());
    k = (k == 0) ? 0 : k - 1;
    if (k >= counts_.size()) k = counts_.size() - 1;  // x == last edge
    ++counts_[k];
    ++n_;
  }

  void add(std::span<const double> xs) {
    for (double x : xs) add(x);
  }

  void merge(const BinCounter& other) {
    if (other.edges_ != edges_) throw std::invalid_argument("cannot merge counters with different edges");
    for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
    n_ += other.n_;
  }

  std::uint64_t total() const noexcept { return n_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& edges() const noexcept { return edges_; }

  Histogram to_histogram() const {
    if (n_ == 0) throw ConfigError("cannot normalize an empty histogram");
    Histogram h;
    h.edges = edges_;
    h.density.resize(counts_.size());
    h.n_samples = n_;
    const auto n = static_cast<double>(n_);
    for (std::size_t k = 0; k < counts_.size(); ++k)
      h.density[k] = static_cast<double>(counts_[k]) / (n * (edges_[k + 1] - edges_[k]));
    h.normalized = true;
    return h;
  }

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_ = 0;
};

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t n_bins) {
  std::vector<double> e(n_bins + 1);
  const double w = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t k = 0; k <= n_bins; ++k) e[k] = lo + w * static_cast<double>(k);
  e.back() = hi;
  return e;
}

/// Bins covering [min, max] widened by one bin width (half a width on each side).
inline std::vector<double> range_edges(std::span<const double> xs, std::size_t n_bins) {
  if (xs.empty()) throw ConfigError("no samples to bin");
  if (n_bins == 0) throw ConfigError("n_bins must be positive");
  auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it, hi = *hi_it;
  const double centre = 0.5 * (lo + hi);
  const double floor = kMinRelativeBinWidth * std::max(1.0, std::abs(centre));
  const double span_w = n_bins > 1 ? (hi - lo) / static_cast<double>(n_bins - 1) : (hi - lo);
  const double w = std::max(span_w, floor);
  const double half = 0.5 * w * static_cast<double>(n_bins);
  return uniform_edges(centre - half, centre + half, n_bins);
}

/// Mirror-symmetric bins about zero covering [-max|x|, max|x|], widened by one bin width.
inline std::vector<double> symmetric_edges(std::span<const double> xs, std::size_t n_bins) {
  if (xs.empty()) throw ConfigError("no samples to bin");
  if (n_bins == 0) throw ConfigError("n_bins must be positive");
  double r = 0.0;
  for (double x : xs) r = std::max(r, std::abs(x));
  const double span_w = n_bins > 1 ? 2.0 * r / static_cast<double>(n_bins - 1) : 2.0 * r;
  const double w = std::max(span_w, kMinRelativeBinWidth);
  const double half = 0.5 * w * static_cast<double>(n_bins);
  auto e = uniform_edges(-half, half, n_bins);
  // exact mirror symmetry
  for (std::size_t k = 0; k < e.size() / 2; ++k) e[e.size() - 1 - k] = -e[k];
  if (e.size() % 2 == 1) e[e.size() / 2] = 0.0;
  return e;
}

inline Histogram histogram_of(std::span<const double> xs, std::vector<double> edges) {
  BinCounter counter(std::move(edges));
  counter.add(xs);
  return counter.to_histogram();
}

inline Histogram histogram_of(std::span<const double> xs, std::size_t n_bins) {
  return histogram_of(xs, range_edges(xs, n_bins));
}

/// sum(midpoint * density * width). Requires a density-normalized histogram.
inline double mean_of(const Histogram& h) {
  if (!h.normalized || std::abs(h.total_mass() - 1.0) > 1e-9)
    throw std::invalid_argument("mean_of requires a density-normalized histogram");
  double m = 0.0;
  for (std::size_t k = 0; k < h.n_bins(); ++k) m += h.midpoint(k) * h.mass(k);
  return m;
}

/// Total-variation distance 0.5 * sum|p_k - q_k| between histograms on identical bins.
inline double total_variation(const Histogram& a, const Histogram& b) {
  if (a.edges != b.edges) throw std::invalid_argument("total_variation requires identical bins");
  double tv = 0.0;
  for (std::size_t k = 0; k < a.n_bins(); ++k) tv += std::abs(a.mass(k) - b.mass(k));
  return 0.5 * tv;
}

/// max_k |density[k] - density[n-1-k]| / peak. Meaningful for mirror-symmetric edges.
inline double mirror_asymmetry(const Histogram& h) {
  const double peak = h.peak_density();
  if (peak <= 0.0) return 0.0;
  double worst = 0.0;
  const std::size_t n = h.n_bins();
  for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(h.density[k] - h.density[n - 1 - k]));
  return worst / peak;
}

}  // namespace rsm
