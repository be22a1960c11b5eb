// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Runs the Monte Carlo studies on the two_bump oracle at
// resolution 128 and re-checks the structural invariants.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sslc/commands.hpp"

using namespace sslc;
namespace fs = std::filesystem;

namespace {

constexpr int kResolution = 128;
constexpr std::uint64_t kSeed = 20240611;
const std::vector<std::size_t> kNs{25, 50, 100, 200};
const std::vector<std::size_t> kMs{1000, 3000, 10000, 30000};

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("%s criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct Context {
  SyntheticDistribution dist = shipped_oracle("two_bump");
  OracleView view = make_oracle_view(dist, dist.lambda_star, kResolution);
  PipelineSettings settings;
  Context() {
    settings.level = dist.lambda_star;
    settings.gamma = dist.gamma;
  }
};

// Population-mode risk curve over kNs.
std::vector<MeanSe> population_curve(const Context& c, std::size_t reps) {
  std::vector<MeanSe> out;
  for (std::size_t n : kNs) out.push_back(mean_se(population_risks(c.dist, c.view, n, reps, kSeed)));
  return out;
}

void criterion1(const Context& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = population_curve(c, 500);
  bool ok = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < kNs.size(); ++i) {
    const double bound = theorem1_bound(c.view.deltas, static_cast<double>(kNs[i])).general;
    ok = ok && curve[i].mean <= bound + 3 * curve[i].se;
    d << fmt("n=%zu risk=%.4g se=%.2g bound=%.4g; ", kNs[i], curve[i].mean, curve[i].se, bound);
  }
  report(1, ok, d.str(), seconds_since(t0));
}

void criterion2(const Context& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = population_curve(c, 100000);
  double delta = 1.0;
  for (double v : c.view.deltas)
    if (v > 0.0) delta = std::min(delta, v);
  std::vector<double> ns, lr;
  for (std::size_t i = 0; i < kNs.size(); ++i)
    if (curve[i].mean > 10 * curve[i].se) {
      ns.push_back(static_cast<double>(kNs[i]));
      lr.push_back(std::log(curve[i].mean));
    }
  const double target = -delta * delta / 2 * 0.8;
  if (ns.size() < 2) {
    report(2, false, fmt("only %zu n values with risk > 10 se", ns.size()), seconds_since(t0));
    return;
  }
  const double slope = fit_slope(ns, lr);
  report(2, slope <= target,
         fmt("slope=%.5f over %zu n values, required <= %.5f (delta=%.4f)", slope, ns.size(),
             target, delta),
         seconds_since(t0));
}

struct PipelineRuns {
  // per m: outcomes of reps 0..count-1
  std::vector<std::vector<RepOutcome>> by_m;
};

PipelineRuns run_pipeline(const Context& c, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineRuns runs;
  for (std::size_t m : kMs) {
    const bool last = m == kMs.back();
    const std::size_t reps = last ? 200 : 100;
    const std::vector<std::size_t> ns = last ? kNs : std::vector<std::size_t>{};
    runs.by_m.push_back(parallel_map<RepOutcome>(reps, [&](std::size_t r) {
      return semi_supervised_rep(c.dist, c.view, ns, m, c.settings, kSeed, r);
    }));
  }
  seconds = seconds_since(t0);
  return runs;
}

double mean_over(const std::vector<RepOutcome>& v, std::size_t count,
                 const std::function<double(const RepOutcome&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += f(v[i]);
  return s / static_cast<double>(count);
}

std::vector<double> criterion3(const PipelineRuns& runs, double seconds) {
  std::vector<double> sd, out;
  std::ostringstream d;
  for (std::size_t i = 0; i < kMs.size(); ++i) {
    sd.push_back(mean_over(runs.by_m[i], 50, [](const RepOutcome& o) { return o.symdiff; }));
    out.push_back(mean_over(runs.by_m[i], 50, [](const RepOutcome& o) { return o.outside; }));
    d << fmt("m=%zu symdiff=%.4g outside=%.3g; ", kMs[i], sd[i], out[i]);
  }
  bool ok = true;
  for (std::size_t i = 1; i < sd.size(); ++i) ok = ok && sd[i] < sd[i - 1];
  ok = ok && out.back() <= 0.2 * sd.back();
  report(3, ok, d.str(), seconds);
  return sd;
}

void criterion4(const PipelineRuns& runs, double seconds) {
  std::vector<double> f;
  std::ostringstream d;
  for (std::size_t i = 0; i < kMs.size(); ++i) {
    f.push_back(mean_over(runs.by_m[i], 100, [](const RepOutcome& o) { return o.event_d ? 1.0 : 0.0; }));
    d << fmt("m=%zu D=%.2f; ", kMs[i], f[i]);
  }
  bool ok = f.back() >= 0.95;
  for (std::size_t i = 1; i < f.size(); ++i) ok = ok && f[i] >= f[i - 1];
  report(4, ok, d.str(), seconds);
}

// Risk decreasing in n (common labeled draws across n): non-increasing step
// to step and strictly lower at the largest n than at the smallest. Once every
// vote is right the remaining risk is the rejected part of Gamma, which does
// not depend on n, so equal neighbours are expected. At the largest
// n no worse than the population risk plus the level-set term
// L * Leb(symdiff) * 2 / (1 - theta).
void criterion5(const Context& c, const PipelineRuns& runs, double symdiff, double seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& reps = runs.by_m.back();
  std::vector<MeanSe> risk;
  std::ostringstream d;
  for (std::size_t i = 0; i < kNs.size(); ++i) {
    std::vector<double> v;
    for (const auto& o : reps) v.push_back(o.risk[i]);
    risk.push_back(mean_se(v));
    d << fmt("n=%zu risk=%.4g se=%.2g; ", kNs[i], risk[i].mean, risk[i].se);
  }
  bool ok = true;
  for (std::size_t i = 1; i < risk.size(); ++i) ok = ok && risk[i].mean <= risk[i - 1].mean;
  ok = ok && risk.back().mean < risk.front().mean;
  const MeanSe pop = mean_se(population_risks(c.dist, c.view, kNs.back(), reps.size(), kSeed));
  const double theta = 0.5;
  const double sup = c.dist.sup_bound.value_or(c.dist.sup_density());
  const double target = pop.mean + symdiff * sup * 2 / (1 - theta);
  ok = ok && risk.back().mean <= target + 3 * risk.back().se;
  d << fmt("pop(200)=%.4g target=%.4g", pop.mean, target);
  report(5, ok, d.str(), seconds + seconds_since(t0));
}

// Compact re-runs of the invariant checks; each returns an empty string on
// success or a description of the first violation.
std::string boolean_identities() {
  Rng rng(1);
  for (int dim = 1; dim <= 3; ++dim) {
    const auto dom = GridDomain::unit(dim, dim == 3 ? 8 : 20);
    for (int t = 0; t < 20; ++t) {
      GridSet a(dom), b(dom), c(dom);
      for (CellIndex i = 0; i < dom.num_cells(); ++i) {
        if (rng.bernoulli(0.4)) a.insert(i);
        if (rng.bernoulli(0.4)) b.insert(i);
        if (rng.bernoulli(0.4)) c.insert(i);
      }
      if ((a ^ b) != ((a - b) | (b - a))) return "symdiff";
      if (((a ^ b) ^ c) != (a ^ (b ^ c))) return "symdiff associativity";
      if ((a & (b | c)) != ((a & b) | (a & c))) return "distributivity";
      if (std::abs(measure(a ^ b) - (measure(a) + measure(b) - 2 * measure(a & b))) > 1e-12)
        return "measure of symdiff";
      if ((a ^ a).count() != 0) return "self symdiff";
    }
  }
  return "";
}

std::string level_set_monotonicity(const Context& c) {
  Rng rng(derive_seed(kSeed, 0, Stream::unlabeled));
  const auto g = std::make_shared<const GridDensity>(
      fit_kde(c.dist.sample_points(3000, rng), KdeConfig{}, c.view.domain));
  const double levels[] = {1, 2, 4, 6};
  const double pens[] = {0.0, 0.3, 1.0};
  for (double l1 : levels)
    for (double l2 : levels)
      for (double p1 : pens)
        for (double p2 : pens)
          if (l1 <= l2 && p1 <= p2 &&
              !plugin_level_set(g, l2, p2).set.subset_of(plugin_level_set(g, l1, p1).set))
            return fmt("lambda %g/%g penalty %g/%g", l1, l2, p1, p2);
  return "";
}

std::string merge_separation() {
  const auto dom = GridDomain::unit(2, 50);
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    GridSet s(dom);
    for (CellIndex i = 0; i < dom.num_cells(); ++i)
      if (rng.bernoulli(0.08)) s.insert(i);
    const double tau = rng.uniform(0.02, 0.2);
    const auto merged = merge_regions(connected_components(s), tau);
    for (std::size_t a = 0; a < merged.num_regions(); ++a)
      for (std::size_t b = a + 1; b < merged.num_regions(); ++b)
        if (!(d_infinity(merged.region_set(a), merged.region_set(b)) > tau))
          return fmt("regions %zu,%zu within tau=%g", a, b, tau);
  }
  return "";
}

std::string proof_inequality(const Context& c, int& held) {
  for (std::size_t m : {3000u, 10000u})
    for (std::size_t r = 0; r < 10; ++r) {
      Rng rng(derive_seed(kSeed + m, r, Stream::unlabeled));
      const auto est = estimate_regions(c.dist.sample_points(m, rng), c.settings, c.view.domain);
      const auto rep = match_components(c.view.truth, est.regions);
      if (!rep.event_d) continue;
      ++held;
      double lhs = 0.0;
      for (std::size_t j = 0; j < rep.assignment.size(); ++j)
        lhs += measure(c.view.truth.region_set(j) ^ est.regions.region_set(rep.assignment[j]));
      if (lhs > measure(c.view.gamma ^ est.clipped.set) + 1e-12) return fmt("m=%zu rep=%zu", m, r);
    }
  return "";
}

std::string gamma_exponent() {
  const std::vector<double> eps{0.05, 0.1, 0.2, 0.4};
  for (const auto& name : shipped_oracle_names()) {
    const auto d = shipped_oracle(name);
    if (!gamma_check(d, d.grid(kResolution), d.lambda_star, eps).pass) return name + " failed";
  }
  // density with a flat shelf exactly at the level
  const auto dom = GridDomain::unit(2, kResolution);
  GridDensity plateau;
  plateau.domain = dom;
  for (CellIndex i = 0; i < dom.num_cells(); ++i) {
    const double x = dom.cell_center(i)[0];
    plateau.values.push_back(x < 0.5 ? 2.0 : 2.0 + 4.0 * (x - 0.5));
  }
  if (gamma_check(plateau, 2.0, eps, 1.0).pass) return "plateau passed";
  return "";
}

std::string kde_brute_force() {
  const auto dom = GridDomain::unit(2, 30);
  Rng rng(3);
  std::vector<Point> xs(300);
  for (auto& x : xs) x = {rng.uniform(), rng.uniform(), 0};
  for (Kernel k : {Kernel::boxcar, Kernel::epanechnikov, Kernel::gaussian}) {
    KdeConfig cfg;
    cfg.kernel = k;
    cfg.bandwidth = 0.07;
    const auto g = fit_kde(xs, cfg, dom);
    for (CellIndex c = 0; c < dom.num_cells(); ++c) {
      const Point y = dom.cell_center(c);
      double s = 0.0;
      for (const Point& x : xs)
        s += kernel_1d(k, (x[0] - y[0]) / 0.07) * kernel_1d(k, (x[1] - y[1]) / 0.07);
      s /= xs.size() * 0.07 * 0.07;
      if (std::abs(s - g.values[c]) > 1e-12) return std::string(kernel_name(k)) + " differs";
    }
  }
  return "";
}

// Union-find over orthogonal neighbours as the reference labeling.
std::string flood_fill() {
  const auto dom = GridDomain::unit(2, 50);
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    GridSet s(dom);
    const double p = rng.uniform(0.2, 0.7);
    for (CellIndex i = 0; i < dom.num_cells(); ++i)
      if (rng.bernoulli(p)) s.insert(i);
    std::vector<std::size_t> parent(dom.num_cells());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (CellIndex i = 0; i < dom.num_cells(); ++i) {
      if (!s.contains(i)) continue;
      const std::size_t row = i / 50, col = i % 50;
      if (col + 1 < 50 && s.contains(i + 1)) parent[find(i)] = find(i + 1);
      if (row + 1 < 50 && s.contains(i + 50)) parent[find(i)] = find(i + 50);
    }
    const auto lab = connected_components(s);
    std::size_t roots = 0;
    for (CellIndex i = 0; i < dom.num_cells(); ++i) roots += s.contains(i) && find(i) == i;
    if (roots != lab.num_components()) return fmt("mask %d: component count", t);
    for (CellIndex i = 0; i < dom.num_cells(); ++i)
      for (CellIndex j : {i + 1, i + 50})
        if (j < dom.num_cells() && s.contains(i) && s.contains(j) &&
            (find(i) == find(j)) != (lab.component_of[i] == lab.component_of[j]))
          return fmt("mask %d: cells %zu,%zu", t, i, j);
    // partition check: same root iff same label for every member pair sharing a root
    std::vector<int> label_of_root(dom.num_cells(), -1);
    for (CellIndex i = 0; i < dom.num_cells(); ++i) {
      if (!s.contains(i)) continue;
      int& l = label_of_root[find(i)];
      if (l < 0) l = lab.component_of[i];
      else if (l != lab.component_of[i]) return fmt("mask %d: split component", t);
    }
  }
  return "";
}

void criterion6(const Context& c) {
  const auto t0 = std::chrono::steady_clock::now();
  int held = 0;
  const std::pair<const char*, std::string> checks[] = {
      {"boolean", boolean_identities()},
      {"monotonicity", level_set_monotonicity(c)},
      {"merge", merge_separation()},
      {"proof", proof_inequality(c, held)},
      {"gamma", gamma_exponent()},
      {"kde", kde_brute_force()},
      {"flood_fill", flood_fill()},
  };
  bool ok = held > 0;
  std::ostringstream d;
  for (const auto& [name, err] : checks) {
    ok = ok && err.empty();
    d << name << (err.empty() ? " ok" : " FAILED(" + err + ")") << "; ";
  }
  d << "D held in " << held << "/20 proof runs";
  report(6, ok, d.str(), seconds_since(t0));
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = parse_experiment(
      R"({"oracle":"two_bump","resolution":64,"n":[10,40],"m":[1000,3000],"reps":4,"seed":99})");
  const fs::path base = fs::temp_directory_path() / "sslc_acceptance_determinism";
  fs::remove_all(base);
  cmd_sweep(cfg, base / "a");
  cmd_sweep(cfg, base / "b");
  bool ok = true;
  for (const char* f : {"sweep.csv", "sweep_fits.csv"})
    ok = ok && io::read_file(base / "a" / f) == io::read_file(base / "b" / f);
  fs::remove_all(base);
  report(7, ok, "sweep.csv and sweep_fits.csv byte-identical across two runs", seconds_since(t0));
}

void criterion8(const Context& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream d;
  bool ok = true;

  // tie: one vote each way in the first true component
  const GridSet t0set = c.view.truth.region_set(0);
  const Point inside = c.view.domain.cell_center(t0set.cells().front());
  LabeledSample tie;
  tie.points = {inside, inside};
  tie.labels = {1, 0};
  const auto model = fit(c.view.truth, tie);
  const bool tie_ok = model.votes[0] == 0 && model.region_label[0] == Label::zero;
  d << "tie->0 " << (tie_ok ? "ok" : "FAILED") << "; ";
  ok = ok && tie_ok;

  // rejection exactly outside the regions
  bool reject_ok = true;
  const auto labels = predict_cells(model);
  for (CellIndex i = 0; i < c.view.domain.num_cells(); ++i)
    reject_ok = reject_ok && ((labels[i] == Label::reject) == !c.view.gamma.contains(i));
  d << "reject outside " << (reject_ok ? "ok" : "FAILED") << "; ";
  ok = ok && reject_ok;

  // rejecting everything costs the full margin mass of Gamma
  const std::vector<Label> all_reject(c.view.domain.num_cells(), Label::reject);
  double full = 0.0;
  for (double v : c.view.deltas) full += v;
  const double charged = thresholded_excess_risk(all_reject, c.view);
  const bool charge_ok = std::abs(charged - full) <= 1e-9 * full && charged > 0.0;
  d << fmt("reject inside charged %.4g vs sum delta %.4g", charged, full);
  ok = ok && charge_ok;
  report(8, ok, d.str(), seconds_since(t0));
}

}  // namespace

int main() {
  const Context c;
  std::printf("oracle two_bump, resolution %d, seed %llu, deltas", kResolution,
              static_cast<unsigned long long>(kSeed));
  for (double v : c.view.deltas) std::printf(" %.4f", v);
  std::printf("\n");

  criterion1(c);
  criterion2(c);
  double pipeline_seconds = 0.0;
  const PipelineRuns runs = run_pipeline(c, pipeline_seconds);
  const auto symdiff = criterion3(runs, pipeline_seconds);
  criterion4(runs, 0.0);
  criterion5(c, runs, symdiff.back(), 0.0);
  criterion6(c);
  criterion7();
  criterion8(c);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
