#pragma once

// Synthetic (p, eta) pairs with known level sets. The marginal is a mixture
// of a uniform background on the domain and radial biweight bumps
//
//   b_j(x) = C_d / R_j^d * (1 - |x - c_j|^2 / R_j^2)^2   for |x - c_j| < R_j,
//
// so p is smooth inside each bump and has a nonvanishing gradient on every
// contour strictly between the background level and the bump peak. The
// regression function is constant per bump on {p >= lambda_star} and equal
// to a background value elsewhere, which makes the cluster assumption and
// every per-component margin exactly computable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sslc/grid.hpp"
#include "sslc/rng.hpp"

namespace sslc {

struct LabeledSample {
  std::vector<Point> points;
  std::vector<int> labels;  // 0 or 1

  std::size_t size() const { return points.size(); }
};

struct Bump {
  Point center{};
  double radius = 0.1;
  double weight = 0.0;
  double eta = 0.5;
};

struct LmaConstants {
  double c0 = 1.0;
  double alpha = 1.0;
};

// Normalizing constant of the biweight profile (1 - r^2)^2 on the unit ball.
inline double biweight_norm(int dim) {
  switch (dim) {
    case 1: return 15.0 / 16.0;
    case 2: return 3.0 / std::numbers::pi;
    case 3: return 105.0 / (32.0 * std::numbers::pi);
  }
  throw std::invalid_argument("biweight_norm: dimension must be in [1, 3]");
}

struct SyntheticDistribution {
  std::string name;
  int dim = 2;
  std::vector<double> lower{0.0, 0.0};
  std::vector<double> upper{1.0, 1.0};
  double background_weight = 0.0;
  double background_eta = 0.5;
  std::vector<Bump> bumps;

  // Declared structural constants.
  double lambda_star = 1.0;
  double r0 = 0.0;
  double r0_c0 = 1.0;  // thickness constant of r0-connectedness
  double s0 = 0.0;
  double gamma = 1.0;
  double gamma_c0 = 1.0;  // constant of the gamma-exponent at lambda_star
  std::optional<double> sup_bound;
  std::optional<LmaConstants> lma;

  double volume() const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= upper[k] - lower[k];
    return v;
  }

  double bump_value(std::size_t j, const Point& x) const {
    const Bump& b = bumps[j];
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
    const double u = r2 / (b.radius * b.radius);
    if (u >= 1.0) return 0.0;
    return b.weight * biweight_norm(dim) / std::pow(b.radius, dim) * (1.0 - u) * (1.0 - u);
  }

  double density_at(const Point& x) const {
    for (int k = 0; k < dim; ++k)
      if (x[k] < lower[k] || x[k] > upper[k]) return 0.0;
    double p = background_weight / volume();
    for (std::size_t j = 0; j < bumps.size(); ++j) p += bump_value(j, x);
    return p;
  }

  double peak_height(std::size_t j) const {
    return bumps[j].weight * biweight_norm(dim) / std::pow(bumps[j].radius, dim);
  }

  // sup p; bumps are validated to have disjoint supports.
  double sup_density() const {
    if (sup_bound) return *sup_bound;
    double best = 0.0;
    for (std::size_t j = 0; j < bumps.size(); ++j) best = std::max(best, peak_height(j));
    return best + background_weight / volume();
  }

  // Bump whose contribution dominates at x, if any.
  std::optional<std::size_t> dominant_bump(const Point& x) const {
    std::optional<std::size_t> best;
    double bv = 0.0;
    for (std::size_t j = 0; j < bumps.size(); ++j) {
      const double v = bump_value(j, x);
      if (v > bv) {
        bv = v;
        best = j;
      }
    }
    return best;
  }

  double eta_at(const Point& x) const {
    if (density_at(x) >= lambda_star) {
      if (auto j = dominant_bump(x)) return bumps[*j].eta;
    }
    return background_eta;
  }

  Point sample_point(Rng& rng) const {
    const double u = rng.uniform();
    double acc = background_weight;
    if (u < acc || bumps.empty()) {
      Point p{};
      for (int k = 0; k < dim; ++k) p[k] = rng.uniform(lower[k], upper[k]);
      return p;
    }
    std::size_t j = bumps.size() - 1;
    for (std::size_t i = 0; i < bumps.size(); ++i) {
      acc += bumps[i].weight;
      if (u < acc) {
        j = i;
        break;
      }
    }
    const Bump& b = bumps[j];
    // Rejection: uniform in the unit cube, keep points of the unit ball with
    // probability (1 - |v|^2)^2.
    for (;;) {
      Point v{};
      double r2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        v[k] = rng.uniform(-1.0, 1.0);
        r2 += v[k] * v[k];
      }
      if (r2 >= 1.0) continue;
      if (rng.uniform() < (1.0 - r2) * (1.0 - r2)) {
        Point p{};
        for (int k = 0; k < dim; ++k) p[k] = b.center[k] + b.radius * v[k];
        return p;
      }
    }
  }

  std::vector<Point> sample_points(std::size_t count, Rng& rng) const {
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample_point(rng));
    return out;
  }

  LabeledSample sample_labeled(std::size_t count, Rng& rng) const {
    LabeledSample s;
    s.points.reserve(count);
    s.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const Point x = sample_point(rng);
      s.points.push_back(x);
      s.labels.push_back(rng.bernoulli(eta_at(x)) ? 1 : 0);
    }
    return s;
  }

  GridDomain grid(int resolution) const {
    return GridDomain(dim, lower, upper, std::vector<int>(dim, resolution));
  }

  // Structural checks that do not need a grid.
  void validate() const {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument(name + ": dim must be in [1, 3]");
    if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim)
      throw std::invalid_argument(name + ": bounds do not match dim");
    double total = background_weight;
    for (const Bump& b : bumps) {
      if (!(b.radius > 0.0)) throw std::invalid_argument(name + ": bump radius must be positive");
      if (b.weight < 0.0) throw std::invalid_argument(name + ": negative weight");
      if (b.eta < 0.0 || b.eta > 1.0) throw std::invalid_argument(name + ": eta outside [0,1]");
      for (int k = 0; k < dim; ++k)
        if (b.center[k] - b.radius < lower[k] || b.center[k] + b.radius > upper[k])
          throw std::invalid_argument(name + ": bump support leaves the domain");
      total += b.weight;
    }
    if (background_weight < 0.0) throw std::invalid_argument(name + ": negative background weight");
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument(name + ": mixture weights sum to " + std::to_string(total));
    for (std::size_t i = 0; i < bumps.size(); ++i)
      for (std::size_t j = i + 1; j < bumps.size(); ++j) {
        double d2 = 0.0;
        for (int k = 0; k < dim; ++k)
          d2 += (bumps[i].center[k] - bumps[j].center[k]) * (bumps[i].center[k] - bumps[j].center[k]);
        if (std::sqrt(d2) < bumps[i].radius + bumps[j].radius)
          throw std::invalid_argument(name + ": bump supports overlap");
      }
    if (!(lambda_star > 0.0)) throw std::invalid_argument(name + ": lambda_star must be positive");
  }
};

inline SyntheticDistribution uniform_distribution(int dim) {
  SyntheticDistribution d;
  d.name = "uniform";
  d.dim = dim;
  d.lower.assign(dim, 0.0);
  d.upper.assign(dim, 1.0);
  d.background_weight = 1.0;
  d.lambda_star = 0.5;
  return d;
}

}  // namespace sslc
