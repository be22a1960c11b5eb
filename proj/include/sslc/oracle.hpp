#pragma once

// Ground-truth evaluation against a synthetic distribution: margins per
// component, the Bayes rule, the lambda-thresholded excess risk, the closed
// form bounds for the population and semi-supervised classifiers, and the
// gamma-exponent check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sslc/classifier.hpp"
#include "sslc/components.hpp"
#include "sslc/density.hpp"
#include "sslc/distribution.hpp"
#include "sslc/grid.hpp"
#include "sslc/level_sets.hpp"
#include "sslc/rng.hpp"
#include "sslc/stats.hpp"

namespace sslc {

// Everything about a distribution that is fixed once the grid and the level
// are chosen.
struct OracleView {
  GridDomain domain;
  double level = 0.0;
  GridDensity density;         // exact p at cell centers
  GridSet gamma;               // {p >= level}
  RegionLabeling truth;        // components T_j of gamma
  std::vector<double> eta;     // per cell
  std::vector<Label> bayes;    // per cell, 1{eta >= 1/2}
  std::vector<double> deltas;  // per true component
};

inline std::vector<Label> bayes(const SyntheticDistribution& dist, const GridDomain& dom) {
  std::vector<Label> out(dom.num_cells());
  for (CellIndex c = 0; c < dom.num_cells(); ++c)
    out[c] = dist.eta_at(dom.cell_center(c)) >= 0.5 ? Label::one : Label::zero;
  return out;
}

// delta_j = ∫_{T_j} |2 eta - 1| p, midpoint rule over the grid.
inline std::vector<double> delta_j(const GridDensity& p, const std::vector<double>& eta,
                                   const RegionLabeling& truth) {
  std::vector<double> out;
  const double vol = p.domain.cell_volume();
  for (std::size_t j = 0; j < truth.num_regions(); ++j) {
    double s = 0.0;
    for (int l : truth.regions[j])
      for (CellIndex c : truth.components[l]) s += std::abs(2.0 * eta[c] - 1.0) * p.values[c];
    out.push_back(s * vol);
  }
  return out;
}

inline OracleView make_oracle_view(const SyntheticDistribution& dist, double level,
                                   const GridDomain& dom) {
  if (!(level > 0.0)) throw std::invalid_argument("oracle view: lambda must be positive");
  OracleView v;
  v.domain = dom;
  v.level = level;
  v.density = exact_density(dist, dom);
  v.gamma = plugin_level_set(v.density, level, 0.0).set;
  v.truth = connected_components(v.gamma);
  v.eta.resize(dom.num_cells());
  for (CellIndex c = 0; c < dom.num_cells(); ++c) v.eta[c] = dist.eta_at(dom.cell_center(c));
  v.bayes = bayes(dist, dom);
  v.deltas = delta_j(v.density, v.eta, v.truth);
  return v;
}

inline OracleView make_oracle_view(const SyntheticDistribution& dist, double level,
                                   int resolution) {
  return make_oracle_view(dist, level, dist.grid(resolution));
}

inline std::vector<double> delta_j(const SyntheticDistribution& dist, double level,
                                   const GridDomain& dom) {
  return make_oracle_view(dist, level, dom).deltas;
}

// 1{eta >= 1/2} is constant on every true component.
inline bool cluster_assumption_holds(const OracleView& v) {
  for (const auto& comp : v.truth.components)
    for (CellIndex c : comp)
      if (v.bayes[c] != v.bayes[comp.front()]) return false;
  return true;
}

// Label of g* on each true component (valid under the cluster assumption).
inline std::vector<Label> component_bayes_labels(const OracleView& v) {
  std::vector<Label> out;
  for (const auto& comp : v.truth.components) out.push_back(v.bayes[comp.front()]);
  return out;
}

// ∫_{Gamma} |2 eta - 1| 1{g != g*} p on the grid. A rejection inside Gamma
// disagrees with g* and is charged.
inline double thresholded_excess_risk(const std::vector<Label>& labels, const OracleView& v) {
  if (labels.size() != v.domain.num_cells())
    throw std::invalid_argument("thresholded_excess_risk: one label per cell expected");
  double s = 0.0;
  for (CellIndex c = 0; c < labels.size(); ++c)
    if (v.gamma.contains(c) && labels[c] != v.bayes[c])
      s += std::abs(2.0 * v.eta[c] - 1.0) * v.density.values[c];
  return s * v.domain.cell_volume();
}

enum class EvalMode { quadrature, monte_carlo };

inline EvalMode parse_eval_mode(const std::string& s) {
  if (s == "quadrature") return EvalMode::quadrature;
  if (s == "monte_carlo") return EvalMode::monte_carlo;
  throw std::invalid_argument("unknown evaluation mode '" + s +
                              "' (expected quadrature|monte_carlo)");
}

struct EvalReport {
  std::string classifier;
  double level = 0.0;
  double risk = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  double thm1_bound = 0.0;
  double thm2_bound = 0.0;
};

// Expectation over training samples: `fit_rep(r)` must build a classifier
// from fresh labeled/unlabeled draws of replication r and return its labels
// on every cell.
inline EvalReport monte_carlo_excess_risk(
    const OracleView& v, std::size_t reps,
    const std::function<std::vector<Label>(std::size_t)>& fit_rep, std::string id = "") {
  if (reps < 1) throw std::invalid_argument("monte_carlo_excess_risk: reps must be >= 1");
  const auto risks = parallel_map<double>(
      reps, [&](std::size_t r) { return thresholded_excess_risk(fit_rep(r), v); });
  const MeanSe ms = mean_se(risks);
  EvalReport rep;
  rep.classifier = std::move(id);
  rep.level = v.level;
  rep.risk = ms.mean;
  rep.se = ms.se;
  rep.reps = reps;
  return rep;
}

// Population-mode risk of the vote on the true components for n labeled
// points; one value per replication.
inline std::vector<double> population_risks(const SyntheticDistribution& dist,
                                            const OracleView& v, std::size_t n,
                                            std::size_t reps, std::uint64_t seed) {
  const auto truth_labels = component_bayes_labels(v);
  return parallel_map<double>(reps, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r, Stream::labeled));
    const LabeledSample s = dist.sample_labeled(n, rng);
    const ClusterVoteModel model = fit_population(v.truth, s);
    double risk = 0.0;
    for (std::size_t j = 0; j < v.truth.num_regions(); ++j)
      if (model.region_label[j] != truth_labels[j]) risk += v.deltas[j];
    return risk;
  });
}

// ---------------------------------------------------------------------------
// Closed-form bounds
// ---------------------------------------------------------------------------

struct Theorem1Bound {
  double general = 0.0;  // 2 sum_j delta_j exp(-n delta_j^2 / 2)
  double gma = 0.0;      // 2 exp(-n delta^2 / 2), delta = min positive delta_j
};

inline double gma_floor(const std::vector<double>& deltas) {
  double d = std::numeric_limits<double>::infinity();
  for (double x : deltas)
    if (x > 0.0) d = std::min(d, x);
  return d;
}

inline Theorem1Bound theorem1_bound(const std::vector<double>& deltas, double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("theorem1_bound: n must be >= 1");
  Theorem1Bound b;
  for (double d : deltas) {
    if (d < 0.0 || d > 1.0) throw std::invalid_argument("theorem1_bound: delta_j outside [0,1]");
    b.general += 2.0 * d * std::exp(-n * d * d / 2.0);
  }
  const double floor = gma_floor(deltas);
  b.gma = std::isfinite(floor) ? 2.0 * std::exp(-n * floor * floor / 2.0) : 0.0;
  return b;
}

struct BoundParams {
  double theta = 0.5;
  double delta = 0.0;  // GMA floor
  std::vector<double> deltas;
  double alpha = 0.0;
  double n = 1.0;
  double m = 1.0;
};

// C m^-alpha / (1 - theta) + sum_j delta_j exp(-n (theta delta_j)^2 / 2).
// The constant C hides the polylog factor and is not determined by the
// theory; callers choose it.
inline double theorem2_bound(const BoundParams& p, double rate_constant) {
  if (!(p.theta > 0.0 && p.theta < 1.0))
    throw std::invalid_argument("theorem2_bound: theta must lie in (0, 1)");
  double s = rate_constant * std::pow(p.m, -p.alpha) / (1.0 - p.theta);
  for (double d : p.deltas) s += d * std::exp(-p.n * (p.theta * d) * (p.theta * d) / 2.0);
  return s;
}

// ---------------------------------------------------------------------------
// gamma-exponent
// ---------------------------------------------------------------------------

struct GammaCheckResult {
  bool pass = true;
  double c0 = 0.0;  // smallest constant with band(eps) <= c0 eps^gamma on the grid of eps
  double slope = std::numeric_limits<double>::quiet_NaN();  // log band vs log eps
  std::vector<double> eps;
  std::vector<double> band;  // Leb{|p - lambda| <= eps}
};

// Measures the band around the level for each eps. The check fails when the
// band does not shrink with eps at least at half the declared rate (a flat
// part of the density at the level). A single eps only reports c0.
inline GammaCheckResult gamma_check(const GridDensity& p, double level,
                                    const std::vector<double>& eps_grid, double gamma) {
  GammaCheckResult r;
  std::vector<double> eps = eps_grid;
  std::sort(eps.begin(), eps.end());
  for (double e : eps) {
    if (!(e > 0.0)) throw std::invalid_argument("gamma_check: eps values must be positive");
    std::size_t cnt = 0;
    for (double v : p.values)
      if (std::abs(v - level) <= e) ++cnt;
    const double b = static_cast<double>(cnt) * p.domain.cell_volume();
    r.eps.push_back(e);
    r.band.push_back(b);
    r.c0 = std::max(r.c0, b / std::pow(e, gamma));
  }
  std::vector<double> le, lb;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (r.band[i] > 0.0) {
      le.push_back(std::log(eps[i]));
      lb.push_back(std::log(r.band[i]));
    }
  if (le.size() >= 2) {
    r.slope = fit_slope(le, lb);
    r.pass = r.slope >= gamma / 2.0;
  }
  return r;
}

inline GammaCheckResult gamma_check(const SyntheticDistribution& dist, const GridDomain& dom,
                                    double level, const std::vector<double>& eps_grid) {
  return gamma_check(exact_density(dist, dom), level, eps_grid, dist.gamma);
}

// ---------------------------------------------------------------------------
// Margin assumptions
// ---------------------------------------------------------------------------

// P_X(0 < |2 eta - 1| <= t) on the grid.
inline double lma_mass(const OracleView& v, double t) {
  double s = 0.0;
  for (CellIndex c = 0; c < v.eta.size(); ++c) {
    const double g = std::abs(2.0 * v.eta[c] - 1.0);
    if (g > 0.0 && g <= t) s += v.density.values[c];
  }
  return s * v.domain.cell_volume();
}

// With finitely many components T_j, LMA(C0, alpha) gives
// P(T_j) <= C0 t_j^alpha on every component with t_j = |2 eta_j - 1| > 0,
// hence delta_j = t_j P(T_j) >= min_j P(T_j)^(1 + 1/alpha) C0^(-1/alpha).
inline double lma_delta_floor(const OracleView& v, const LmaConstants& lma) {
  double pmin = std::numeric_limits<double>::infinity();
  const double vol = v.domain.cell_volume();
  for (const auto& comp : v.truth.components) {
    double s = 0.0;
    for (CellIndex c : comp) s += v.density.values[c];
    pmin = std::min(pmin, s * vol);
  }
  if (!std::isfinite(pmin)) return 0.0;
  return std::pow(pmin, 1.0 + 1.0 / lma.alpha) * std::pow(lma.c0, -1.0 / lma.alpha);
}

// Does the declared LMA hold at every distinct margin value on the grid?
inline bool lma_holds(const OracleView& v, const LmaConstants& lma) {
  std::vector<double> ts;
  for (double e : v.eta) ts.push_back(std::abs(2.0 * e - 1.0));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (double t : ts)
    if (t > 0.0 && lma_mass(v, t) > lma.c0 * std::pow(t, lma.alpha) * (1.0 + 1e-12)) return false;
  return true;
}

struct MisvoteEstimate {
  std::vector<double> frequency;  // per true component
  std::vector<double> se;
};

// Monte Carlo frequency with which the population vote on T_j disagrees
// with g* on T_j.
inline MisvoteEstimate misvote_frequency(const SyntheticDistribution& dist, const OracleView& v,
                                         std::size_t n, std::size_t reps, std::uint64_t seed) {
  const auto truth_labels = component_bayes_labels(v);
  const std::size_t J = v.truth.num_regions();
  const auto wrong = parallel_map<std::vector<std::uint8_t>>(reps, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r, Stream::labeled));
    const ClusterVoteModel model = fit_population(v.truth, dist.sample_labeled(n, rng));
    std::vector<std::uint8_t> w(J);
    for (std::size_t j = 0; j < J; ++j) w[j] = model.region_label[j] != truth_labels[j];
    return w;
  });
  MisvoteEstimate est;
  for (std::size_t j = 0; j < J; ++j) {
    double k = 0.0;
    for (const auto& w : wrong) k += w[j];
    const double f = k / static_cast<double>(reps);
    est.frequency.push_back(f);
    est.se.push_back(std::sqrt(f * (1.0 - f) / static_cast<double>(reps)));
  }
  return est;
}

inline void write_eval_csv_header(std::ostream& os) {
  os << "classifier,lambda,risk,se,reps,thm1_bound,thm2_bound\n";
}

inline void write_eval_csv_row(std::ostream& os, const EvalReport& r) {
  os.precision(10);
  os << r.classifier << ',' << r.level << ',' << r.risk << ',' << r.se << ',' << r.reps << ','
     << r.thm1_bound << ',' << r.thm2_bound << '\n';
}

}  // namespace sslc
