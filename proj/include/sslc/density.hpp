#pragma once

// Kernel density estimation on the grid and exact-density evaluation for
// oracle distributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sslc/grid.hpp"
#include "sslc/rng.hpp"

namespace sslc {

enum class Provenance { estimated, exact };

struct GridDensity {
  GridDomain domain;
  std::vector<double> values;  // one per cell, probability per unit volume
  Provenance provenance = Provenance::estimated;
  std::size_t sample_size = 0;  // 0 for exact densities
  double bandwidth = 0.0;
  std::optional<double> sup_bound;

  double at(CellIndex c) const { return values[c]; }

  double integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * domain.cell_volume();
  }

  double max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  }

  bool normalized(double eps_norm = 0.05) const {
    const double i = integral();
    return i >= 1.0 - eps_norm && i <= 1.0 + eps_norm;
  }
};

enum class Kernel { boxcar, epanechnikov, gaussian };

inline const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::boxcar: return "boxcar";
    case Kernel::epanechnikov: return "epanechnikov";
    case Kernel::gaussian: return "gaussian";
  }
  return "?";
}

inline Kernel parse_kernel(const std::string& s) {
  if (s == "boxcar") return Kernel::boxcar;
  if (s == "epanechnikov") return Kernel::epanechnikov;
  if (s == "gaussian") return Kernel::gaussian;
  throw std::invalid_argument("unknown kernel '" + s +
                              "' (expected boxcar|epanechnikov|gaussian)");
}

// Product kernels: K(u) = prod_k k1(u_k).
//   boxcar        k1(t) = 1{|t| <= 1/2}
//   epanechnikov  k1(t) = 3/4 (1 - t^2) on |t| <= 1
//   gaussian      standard normal density truncated to |t| <= 4, renormalized
inline double kernel_support(Kernel k) {
  switch (k) {
    case Kernel::boxcar: return 0.5;
    case Kernel::epanechnikov: return 1.0;
    case Kernel::gaussian: return 4.0;
  }
  return 0.0;
}

inline double kernel_1d(Kernel k, double t) {
  const double a = std::abs(t);
  switch (k) {
    case Kernel::boxcar:
      return a <= 0.5 ? 1.0 : 0.0;
    case Kernel::epanechnikov:
      return a <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0;
    case Kernel::gaussian: {
      if (a > 4.0) return 0.0;
      static const double norm = std::erf(4.0 / std::numbers::sqrt2);
      return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi) / norm;
    }
  }
  return 0.0;
}

inline double kernel_sup_1d(Kernel k) { return kernel_1d(k, 0.0); }

struct KdeConfig {
  Kernel kernel = Kernel::epanechnikov;
  std::optional<double> bandwidth;  // explicit h; otherwise m^(-1/(2 beta + d))
  double beta = 1.0;                // Hoelder smoothness

  double exponent_a(int dim) const {
    if (!(beta > 0.0)) throw std::invalid_argument("KdeConfig: beta must be positive");
    return 2.0 * beta / (2.0 * beta + dim);
  }

  double bandwidth_for(std::size_t m, int dim) const {
    if (bandwidth) return *bandwidth;
    if (m == 0) throw std::invalid_argument("KdeConfig: bandwidth rule needs m >= 1");
    return std::pow(static_cast<double>(m), -1.0 / (2.0 * beta + dim));
  }
};

// Value at each cell center x: (1 / (m h^d)) sum_i K((X_i - x) / h).
inline GridDensity fit_kde(std::span<const Point> sample, const KdeConfig& cfg,
                           const GridDomain& dom) {
  if (sample.empty()) throw std::invalid_argument("fit_kde: empty sample");
  const int d = dom.dim();
  const double h = cfg.bandwidth_for(sample.size(), d);
  if (!(h > 0.0)) throw std::invalid_argument("fit_kde: bandwidth must be positive");
  for (std::size_t i = 0; i < sample.size(); ++i)
    if (!dom.contains(sample[i]))
      throw std::invalid_argument("fit_kde: point " + std::to_string(i) +
                                  " lies outside the domain");

  GridDensity out;
  out.domain = dom;
  out.values.assign(dom.num_cells(), 0.0);
  out.provenance = Provenance::estimated;
  out.sample_size = sample.size();
  out.bandwidth = h;

  const double reach = kernel_support(cfg.kernel) * h;
  std::array<std::vector<double>, kMaxDim> w;
  std::array<long, kMaxDim> first{};
  for (const Point& x : sample) {
    for (int k = 0; k < d; ++k) {
      const double wk = dom.width(k);
      // cells whose center lies in [x - reach, x + reach]
      long lo = static_cast<long>(std::floor((x[k] - reach - dom.lower(k)) / wk - 0.5));
      long hi = static_cast<long>(std::ceil((x[k] + reach - dom.lower(k)) / wk - 0.5));
      lo = std::max(lo, 0L);
      hi = std::min(hi, static_cast<long>(dom.resolution(k) - 1));
      first[k] = lo;
      w[k].clear();
      for (long i = lo; i <= hi; ++i) {
        const double center = dom.lower(k) + (i + 0.5) * wk;
        w[k].push_back(kernel_1d(cfg.kernel, (x[k] - center) / h));
      }
    }
    if (d == 1) {
      for (std::size_t i = 0; i < w[0].size(); ++i)
        out.values[first[0] + i] += w[0][i];
    } else if (d == 2) {
      for (std::size_t i = 0; i < w[0].size(); ++i) {
        if (w[0][i] == 0.0) continue;
        const std::size_t row = (first[0] + i) * dom.stride(0) + first[1];
        for (std::size_t j = 0; j < w[1].size(); ++j)
          out.values[row + j] += w[0][i] * w[1][j];
      }
    } else {
      for (std::size_t i = 0; i < w[0].size(); ++i)
        for (std::size_t j = 0; j < w[1].size(); ++j) {
          const double wij = w[0][i] * w[1][j];
          if (wij == 0.0) continue;
          const std::size_t base = (first[0] + i) * dom.stride(0) +
                                   (first[1] + j) * dom.stride(1) + first[2];
          for (std::size_t l = 0; l < w[2].size(); ++l) out.values[base + l] += wij * w[2][l];
        }
    }
  }
  const double scale = 1.0 / (static_cast<double>(sample.size()) * std::pow(h, d));
  for (double& v : out.values) v *= scale;
  out.sup_bound = std::pow(kernel_sup_1d(cfg.kernel), d) / std::pow(h, d);
  return out;
}

// Closed-form density at cell centers. Dist needs density_at(Point) and,
// optionally, sup_density().
template <class Dist>
GridDensity exact_density(const Dist& dist, const GridDomain& dom) {
  GridDensity out;
  out.domain = dom;
  out.values.resize(dom.num_cells());
  for (CellIndex c = 0; c < dom.num_cells(); ++c)
    out.values[c] = dist.density_at(dom.cell_center(c));
  out.provenance = Provenance::exact;
  if constexpr (requires { dist.sup_density(); }) out.sup_bound = dist.sup_density();
  return out;
}

// Export as CSV: x0[,x1[,x2]],value
inline void write_density_csv(std::ostream& os, const GridDensity& g) {
  const GridDomain& dom = g.domain;
  os.precision(12);
  for (int k = 0; k < dom.dim(); ++k) os << 'x' << k << ',';
  os << "value\n";
  for (CellIndex c = 0; c < dom.num_cells(); ++c) {
    const Point p = dom.cell_center(c);
    for (int k = 0; k < dom.dim(); ++k) os << p[k] << ',';
    os << g.values[c] << '\n';
  }
}

struct ConcentrationResult {
  double max_exceedance = 0.0;        // max over probe cells
  std::vector<double> per_probe;      // exceedance frequency per probe cell
  std::vector<CellIndex> probes;
  double bound = 0.0;                 // c1 exp(-c2 m^a delta^2)
  std::size_t reps = 0;
};

struct ConcentrationParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double upper = 10.0;  // the window's upper end Delta
};

// Default probe set: cells at 1/4, 1/2, 3/4 along each axis.
inline std::vector<CellIndex> default_probe_cells(const GridDomain& dom) {
  std::vector<CellIndex> out;
  const int per_axis = 3;
  int total = 1;
  for (int k = 0; k < dom.dim(); ++k) total *= per_axis;
  for (int t = 0; t < total; ++t) {
    Point p{};
    int rest = t;
    for (int k = 0; k < dom.dim(); ++k) {
      const int q = rest % per_axis;
      rest /= per_axis;
      p[k] = dom.lower(k) + (dom.upper(k) - dom.lower(k)) * (q + 1) / 4.0;
    }
    out.push_back(*dom.cell_of(p));
  }
  return out;
}

// Monte Carlo estimate of P_m(|p_hat(x) - p(x)| >= delta) at a fixed set of
// probe cells; the reported statistic is the maximum over probes. Only
// defined on the window m^(-a/2) < delta < Delta.
template <class Dist>
ConcentrationResult concentration_diagnostic(const Dist& dist, const KdeConfig& cfg,
                                             const GridDomain& dom, std::size_t m,
                                             double delta, std::size_t reps,
                                             std::uint64_t seed,
                                             const ConcentrationParams& params = {},
                                             std::vector<CellIndex> probes = {}) {
  const double a = cfg.exponent_a(dom.dim());
  const double lower = std::pow(static_cast<double>(m), -a / 2.0);
  if (!(delta > lower && delta < params.upper))
    throw std::domain_error("concentration_diagnostic: delta = " + std::to_string(delta) +
                            " outside (m^(-a/2), Delta) = (" + std::to_string(lower) +
                            ", " + std::to_string(params.upper) + ")");
  if (reps == 0) throw std::invalid_argument("concentration_diagnostic: reps must be >= 1");
  if (probes.empty()) probes = default_probe_cells(dom);

  std::vector<double> truth;
  for (CellIndex c : probes) truth.push_back(dist.density_at(dom.cell_center(c)));

  std::vector<std::size_t> hits(probes.size(), 0);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(derive_seed(seed, r, Stream::probe));
    const std::vector<Point> xs = dist.sample_points(m, rng);
    const GridDensity est = fit_kde(xs, cfg, dom);
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (std::abs(est.values[probes[i]] - truth[i]) >= delta) ++hits[i];
  }

  ConcentrationResult res;
  res.probes = probes;
  res.reps = reps;
  for (std::size_t h : hits) {
    const double f = static_cast<double>(h) / static_cast<double>(reps);
    res.per_probe.push_back(f);
    res.max_exceedance = std::max(res.max_exceedance, f);
  }
  res.bound = params.c1 * std::exp(-params.c2 * std::pow(static_cast<double>(m), a) * delta * delta);
  return res;
}

}  // namespace sslc
