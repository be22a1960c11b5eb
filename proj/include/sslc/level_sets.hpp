#pragma once

// Penalized plug-in level-set estimation, clipping of thin pieces, and the
// Monte Carlo consistency-from-inside probe.

#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sslc/density.hpp"
#include "sslc/error.hpp"
#include "sslc/grid.hpp"
#include "sslc/rng.hpp"
#include "sslc/stats.hpp"

namespace sslc {

struct LevelSetEstimate {
  GridSet set;
  double level = 0.0;    // lambda
  double penalty = 0.0;  // ell
  std::shared_ptr<const GridDensity> source;
  bool clipped = false;
  double removed_measure = 0.0;  // measure taken away by clipping
};

// ell(m) = m^(-a/2) log m, natural logarithm.
inline double penalty(double m, double a) {
  if (!(m >= 2.0)) throw std::invalid_argument("penalty: m must be >= 2");
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("penalty: a must lie in (0, 1]");
  return std::pow(m, -a / 2.0) * std::log(m);
}

// {x : density(x) >= level + pen}, evaluated at cell centers.
inline LevelSetEstimate plugin_level_set(std::shared_ptr<const GridDensity> density,
                                         double level, double pen) {
  if (!(level > 0.0)) throw std::invalid_argument("plugin_level_set: lambda must be positive");
  if (!(pen >= 0.0)) throw std::invalid_argument("plugin_level_set: penalty must be >= 0");
  LevelSetEstimate out;
  out.set = GridSet(density->domain);
  const double thr = level + pen;
  for (CellIndex c = 0; c < density->values.size(); ++c)
    if (density->values[c] >= thr) out.set.insert(c);
  out.level = level;
  out.penalty = pen;
  out.source = std::move(density);
  return out;
}

inline LevelSetEstimate plugin_level_set(const GridDensity& density, double level, double pen) {
  return plugin_level_set(std::make_shared<const GridDensity>(density), level, pen);
}

struct ClipGeometry {
  double radius = 0.0;     // (log m)^-1
  double threshold = 0.0;  // (log m)^-d / m^alpha
};

inline ClipGeometry clip_geometry(const GridDomain& dom, double m, double alpha) {
  if (!(m >= 3.0))
    throw InfeasibleError("clip: m = " + std::to_string(m) + " is below 3, (log m)^-1 >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("clip: alpha must be positive");
  ClipGeometry g;
  const double lm = std::log(m);
  g.radius = 1.0 / lm;
  g.threshold = std::pow(lm, -dom.dim()) / std::pow(m, alpha);
  if (g.radius < dom.min_width())
    throw InfeasibleError("clip: ball radius (log m)^-1 = " + std::to_string(g.radius) +
                          " is smaller than a cell width " + std::to_string(dom.min_width()) +
                          "; refine the grid");
  return g;
}

// Removes Clip(G) = {x in G : Leb(G ∩ B(x, (log m)^-1)) <= (log m)^-d / m^alpha}.
inline LevelSetEstimate clip(const LevelSetEstimate& g, double m, double alpha) {
  const GridDomain& dom = g.set.domain();
  const ClipGeometry geo = clip_geometry(dom, m, alpha);
  const auto offsets = ball_offsets(dom, geo.radius);
  const double vol = dom.cell_volume();

  LevelSetEstimate out = g;
  out.clipped = true;
  std::size_t removed = 0;
  for (CellIndex c = 0; c < dom.num_cells(); ++c) {
    if (!g.set.contains(c)) continue;
    const MultiIndex mc = dom.multi_index(c);
    double mass = 0.0;
    bool keep = false;
    for (const auto& o : offsets) {
      MultiIndex q{};
      for (int k = 0; k < dom.dim(); ++k) q[k] = mc[k] + o[k];
      if (!dom.in_range(q) || !g.set.contains(dom.linear_index(q))) continue;
      mass += vol;
      if (mass > geo.threshold) {
        keep = true;
        break;
      }
    }
    if (!keep) {
      out.set.erase(c);
      ++removed;
    }
  }
  out.removed_measure = g.removed_measure + static_cast<double>(removed) * vol;
  return out;
}

struct ConsistencyReport {
  std::size_t m = 0;
  double alpha = 0.0;  // claimed rate exponent gamma * a / 2
  double penalty = 0.0;
  double mean_symdiff = 0.0;
  double mean_outside = 0.0;         // Leb(G ∩ Gamma^c)
  double mean_inside_deficit = 0.0;  // Leb(G^c ∩ Gamma)
  double se_symdiff = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double slope_symdiff = 0.0;  // log-log slope across the probed m values
  double slope_outside = 0.0;
};

struct ProbeOptions {
  double level = 1.0;
  std::vector<std::size_t> m_values;
  std::size_t reps = 10;
  std::uint64_t seed = 0;
  double gamma = 1.0;  // declared gamma-exponent of the truth
  int resolution = 128;
};

// Monte Carlo means of Leb(Gamma_ell △ Gamma), Leb(Gamma_ell ∩ Gamma^c) and
// Leb(Gamma_ell^c ∩ Gamma) for the penalized KDE plug-in estimator.
template <class Dist>
std::vector<ConsistencyReport> consistency_from_inside_probe(const Dist& dist,
                                                             const KdeConfig& cfg,
                                                             const ProbeOptions& opt) {
  if (opt.m_values.size() < 2)
    throw std::invalid_argument("consistency probe: need at least two values of m");
  if (opt.reps == 0) throw std::invalid_argument("consistency probe: reps must be >= 1");
  const GridDomain dom = dist.grid(opt.resolution);
  const GridDensity truth_density = exact_density(dist, dom);
  const GridSet truth = plugin_level_set(truth_density, opt.level, 0.0).set;
  const double a = cfg.exponent_a(dom.dim());

  std::vector<ConsistencyReport> out;
  for (std::size_t m : opt.m_values) {
    const double ell = penalty(static_cast<double>(m), a);
    struct Row {
      double symdiff, outside, inside;
    };
    const auto rows = parallel_map<Row>(opt.reps, [&](std::size_t r) {
      Rng rng(derive_seed(opt.seed, r, Stream::unlabeled));
      const auto xs = dist.sample_points(m, rng);
      const GridSet est = plugin_level_set(fit_kde(xs, cfg, dom), opt.level, ell).set;
      return Row{measure(est ^ truth), measure(est - truth), measure(truth - est)};
    });
    std::vector<double> sd, os, is;
    for (const Row& r : rows) {
      sd.push_back(r.symdiff);
      os.push_back(r.outside);
      is.push_back(r.inside);
    }
    ConsistencyReport rep;
    rep.m = m;
    rep.alpha = opt.gamma * a / 2.0;
    rep.penalty = ell;
    const MeanSe s = mean_se(sd);
    rep.mean_symdiff = s.mean;
    rep.se_symdiff = s.se;
    rep.mean_outside = mean_se(os).mean;
    rep.mean_inside_deficit = mean_se(is).mean;
    rep.reps = opt.reps;
    rep.seed = opt.seed;
    out.push_back(rep);
  }
  std::vector<double> ms, sds, outs;
  for (const auto& r : out) {
    ms.push_back(static_cast<double>(r.m));
    sds.push_back(r.mean_symdiff);
    outs.push_back(r.mean_outside);
  }
  const double slope_sd = fit_loglog_slope(ms, sds);
  double slope_out = 0.0;
  std::size_t positive = 0;
  for (double v : outs) positive += v > 0.0 ? 1 : 0;
  if (positive >= 2) slope_out = fit_loglog_slope(ms, outs);
  for (auto& r : out) {
    r.slope_symdiff = slope_sd;
    r.slope_outside = slope_out;
  }
  return out;
}

inline void write_consistency_csv(std::ostream& os, const std::vector<ConsistencyReport>& rows) {
  os.precision(10);
  os << "m,reps,mean_symdiff,mean_outside,mean_inside_deficit,se_symdiff,penalty,alpha,"
        "slope_symdiff,slope_outside\n";
  for (const auto& r : rows)
    os << r.m << ',' << r.reps << ',' << r.mean_symdiff << ',' << r.mean_outside << ','
       << r.mean_inside_deficit << ',' << r.se_symdiff << ',' << r.penalty << ',' << r.alpha
       << ',' << r.slope_symdiff << ',' << r.slope_outside << '\n';
}

}  // namespace sslc
