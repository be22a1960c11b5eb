#pragma once

// End-to-end procedure: unlabeled sample -> KDE -> penalized level set ->
// clipping -> components -> merged regions -> majority vote, plus the
// Monte Carlo sweep over (n, m) used by the CLI and the acceptance suite.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sslc/classifier.hpp"
#include "sslc/components.hpp"
#include "sslc/config.hpp"
#include "sslc/density.hpp"
#include "sslc/level_sets.hpp"
#include "sslc/oracle.hpp"
#include "sslc/stats.hpp"

namespace sslc {

struct PipelineSettings {
  double level = 1.0;
  KdeConfig kde;
  std::optional<double> clip_alpha;  // default gamma * a / 2
  std::optional<double> merge_tau;   // default 2 / log m
  double gamma = 1.0;

  static PipelineSettings from(const ExperimentConfig& c, double level) {
    PipelineSettings s;
    s.level = level;
    s.kde = c.kde;
    s.clip_alpha = c.clip_alpha;
    s.merge_tau = c.merge_tau;
    s.gamma = c.oracle.gamma;
    return s;
  }
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct Estimation {
  std::shared_ptr<const GridDensity> density;
  LevelSetEstimate penalized;  // {p_hat >= lambda + ell}
  LevelSetEstimate clipped;    // penalized minus Clip(.)
  RegionLabeling components;
  RegionLabeling regions;
  double ell = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  std::vector<StageTiming> timings;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}
  void mark(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace detail

inline Estimation estimate_regions(std::span<const Point> unlabeled, const PipelineSettings& s,
                                   const GridDomain& dom) {
  const auto m = static_cast<double>(unlabeled.size());
  if (m < 3.0)
    throw InfeasibleError("pipeline: m = " + std::to_string(unlabeled.size()) +
                          " unlabeled points; clipping needs m >= 3");
  Estimation e;
  detail::StageClock clock(e.timings);
  const double a = s.kde.exponent_a(dom.dim());
  e.ell = penalty(m, a);
  e.alpha = s.clip_alpha.value_or(s.gamma * a / 2.0);
  e.tau = s.merge_tau.value_or(2.0 / std::log(m));
  clip_geometry(dom, m, e.alpha);  // fail before the expensive stages

  e.density = std::make_shared<const GridDensity>(fit_kde(unlabeled, s.kde, dom));
  clock.mark("kde");
  e.penalized = plugin_level_set(e.density, s.level, e.ell);
  clock.mark("level_set");
  e.clipped = clip(e.penalized, m, e.alpha);
  clock.mark("clip");
  e.components = connected_components(e.clipped.set);
  clock.mark("components");
  e.regions = merge_regions(e.components, e.tau);
  clock.mark("merge");
  return e;
}

// One Monte Carlo replication of the semi-supervised classifier.
struct RepOutcome {
  std::vector<double> risk;  // per n value
  bool event_d = false;
  double symdiff = 0.0;  // Leb(penalized △ Gamma)
  double outside = 0.0;  // Leb(penalized ∩ Gamma^c)
};

inline RepOutcome semi_supervised_rep(const SyntheticDistribution& dist, const OracleView& view,
                                      const std::vector<std::size_t>& n_values, std::size_t m,
                                      const PipelineSettings& s, std::uint64_t seed,
                                      std::size_t rep) {
  Rng urng(derive_seed(seed, rep, Stream::unlabeled));
  const auto xs = dist.sample_points(m, urng);
  const Estimation e = estimate_regions(xs, s, view.domain);
  RepOutcome out;
  out.symdiff = measure(e.penalized.set ^ view.gamma);
  out.outside = measure(e.penalized.set - view.gamma);
  out.event_d = match_components(view.truth, e.regions).event_d;
  for (std::size_t n : n_values) {
    // Common random numbers across n: the first n draws of one stream.
    Rng lrng(derive_seed(seed, rep, Stream::labeled));
    const ClusterVoteModel model = fit(e.regions, dist.sample_labeled(n, lrng));
    out.risk.push_back(thresholded_excess_risk(predict_cells(model), view));
  }
  return out;
}

struct SweepRow {
  double level = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t reps = 0;
  double risk = 0.0;
  double se = 0.0;
  double thm1_bound = 0.0;
  double thm2_bound = 0.0;
  double d_frequency = 0.0;
  double symdiff_mean = 0.0;
  double outside_mean = 0.0;
  double px_gamma_c = 0.0;  // P_X(Gamma^c), mass of the rejection region under the truth
  std::vector<double> deltas;
};

struct SweepFit {
  double level = 0.0;
  double risk_slope_n = std::numeric_limits<double>::quiet_NaN();   // d log risk / d n at max m
  double symdiff_slope_m = std::numeric_limits<double>::quiet_NaN();  // d log symdiff / d log m
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepFit> fits;
};

inline double rejection_mass(const OracleView& v) {
  double s = 0.0;
  for (CellIndex c = 0; c < v.domain.num_cells(); ++c)
    if (!v.gamma.contains(c)) s += v.density.values[c];
  return s * v.domain.cell_volume();
}

inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.n_values.size() < 2)
    throw ConfigError("config.n: a sweep needs at least two values of n");
  if (!cfg.population && cfg.m_values.size() < 2)
    throw ConfigError("config.m: a sweep needs at least two values of m");
  const GridDomain dom = cfg.oracle.grid(cfg.resolution);
  SweepResult res;
  for (double level : cfg.sweep_levels()) {
    const OracleView view = make_oracle_view(cfg.oracle, level, dom);
    const PipelineSettings s = PipelineSettings::from(cfg, level);
    const double a = cfg.kde.exponent_a(dom.dim());
    const double alpha = cfg.clip_alpha.value_or(cfg.oracle.gamma * a / 2.0);
    const double pgc = rejection_mass(view);
    const std::size_t first = res.rows.size();

    auto make_row = [&](std::size_t n, std::size_t m) {
      SweepRow row;
      row.level = level;
      row.n = n;
      row.m = m;
      row.reps = cfg.reps;
      row.deltas = view.deltas;
      row.px_gamma_c = pgc;
      row.thm1_bound = theorem1_bound(view.deltas, static_cast<double>(n)).general;
      BoundParams bp;
      bp.theta = cfg.theta;
      bp.deltas = view.deltas;
      bp.delta = gma_floor(view.deltas);
      bp.alpha = alpha;
      bp.n = static_cast<double>(n);
      bp.m = static_cast<double>(m);
      row.thm2_bound = theorem2_bound(bp, cfg.thm2_constant);
      return row;
    };

    if (cfg.population) {
      for (std::size_t n : cfg.n_values) {
        const MeanSe r = mean_se(population_risks(cfg.oracle, view, n, cfg.reps, cfg.seed));
        for (std::size_t m : cfg.m_values) {
          SweepRow row = make_row(n, m);
          row.risk = r.mean;
          row.se = r.se;
          row.d_frequency = 1.0;
          res.rows.push_back(row);
        }
      }
    } else {
      std::vector<std::vector<SweepRow>> by_m;
      for (std::size_t m : cfg.m_values) {
        const auto outcomes = parallel_map<RepOutcome>(cfg.reps, [&](std::size_t r) {
          return semi_supervised_rep(cfg.oracle, view, cfg.n_values, m, s, cfg.seed, r);
        });
        std::vector<double> sd, outs;
        double d_count = 0.0;
        for (const auto& o : outcomes) {
          sd.push_back(o.symdiff);
          outs.push_back(o.outside);
          d_count += o.event_d ? 1.0 : 0.0;
        }
        std::vector<SweepRow> rows;
        for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
          std::vector<double> risks;
          for (const auto& o : outcomes) risks.push_back(o.risk[i]);
          const MeanSe r = mean_se(risks);
          SweepRow row = make_row(cfg.n_values[i], m);
          row.risk = r.mean;
          row.se = r.se;
          row.d_frequency = d_count / static_cast<double>(cfg.reps);
          row.symdiff_mean = mean_se(sd).mean;
          row.outside_mean = mean_se(outs).mean;
          rows.push_back(row);
        }
        by_m.push_back(std::move(rows));
      }
      // rows ordered by n, then m
      for (std::size_t i = 0; i < cfg.n_values.size(); ++i)
        for (auto& rows : by_m) res.rows.push_back(rows[i]);
    }

    SweepFit fit_row;
    fit_row.level = level;
    const std::size_t max_m = *std::max_element(cfg.m_values.begin(), cfg.m_values.end());
    std::vector<double> ns, lr, ms, sds;
    for (std::size_t i = first; i < res.rows.size(); ++i) {
      const SweepRow& row = res.rows[i];
      if (row.m == max_m && row.risk > 0.0) {
        ns.push_back(static_cast<double>(row.n));
        lr.push_back(std::log(row.risk));
      }
      if (row.n == cfg.n_values.front() && row.symdiff_mean > 0.0) {
        ms.push_back(static_cast<double>(row.m));
        sds.push_back(row.symdiff_mean);
      }
    }
    if (ns.size() >= 2) fit_row.risk_slope_n = fit_slope(ns, lr);
    if (ms.size() >= 2) fit_row.symdiff_slope_m = fit_loglog_slope(ms, sds);
    res.fits.push_back(fit_row);
  }
  return res;
}

inline const char* kSweepHeader =
    "n,m,reps,risk,se,thm1_bound,thm2_bound_shape,D_frequency,symdiff_mean,lambda,"
    "outside_mean,px_gamma_c,deltas";

inline std::string join_deltas(const std::vector<double>& d) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? ";" : "") << d[i];
  return os.str();
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << kSweepHeader << '\n';
  os.precision(10);
  for (const auto& row : r.rows)
    os << row.n << ',' << row.m << ',' << row.reps << ',' << row.risk << ',' << row.se << ','
       << row.thm1_bound << ',' << row.thm2_bound << ',' << row.d_frequency << ','
       << row.symdiff_mean << ',' << row.level << ',' << row.outside_mean << ','
       << row.px_gamma_c << ',' << join_deltas(row.deltas) << '\n';
}

inline void write_sweep_fits_csv(std::ostream& os, const SweepResult& r) {
  os << "lambda,risk_slope_n,symdiff_slope_logm\n";
  os.precision(10);
  for (const auto& f : r.fits)
    os << f.level << ',' << f.risk_slope_n << ',' << f.symdiff_slope_m << '\n';
}

}  // namespace sslc
