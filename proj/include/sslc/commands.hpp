#pragma once

// Implementations behind the `sslc` subcommands. Each command writes its
// outputs under a directory and returns the list of emitted files; failures
// surface as sslc::Error with the exit code to use.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sslc/classifier.hpp"
#include "sslc/config.hpp"
#include "sslc/io.hpp"
#include "sslc/oracle.hpp"
#include "sslc/pipeline.hpp"

namespace sslc {

inline constexpr const char* kToolVersion = "0.1.0";

struct CommandResult {
  std::vector<std::string> files;  // relative to the output directory
  std::vector<std::string> warnings;
};

namespace detail {

inline json domain_to_json(const GridDomain& d) {
  std::vector<double> lo, hi;
  std::vector<int> res;
  for (int k = 0; k < d.dim(); ++k) {
    lo.push_back(d.lower(k));
    hi.push_back(d.upper(k));
    res.push_back(d.resolution(k));
  }
  return {{"dim", d.dim()}, {"lower", lo}, {"upper", hi}, {"resolution", res}};
}

inline GridDomain domain_from_json(const json& j) {
  return GridDomain(j.at("dim").get<int>(), j.at("lower").get<std::vector<double>>(),
                    j.at("upper").get<std::vector<double>>(),
                    j.at("resolution").get<std::vector<int>>());
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory '" + root_.string() + "'");
  }
  void write(const std::string& name, const std::string& content) {
    io::write_file(root_ / name, content);
    files_.push_back(name);
  }
  template <class Fn>
  void write_with(const std::string& name, Fn&& fn) {
    std::ostringstream os;
    fn(os);
    write(name, os.str());
  }
  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

inline void write_manifest(OutputDir& out, const std::string& command, const json& config,
                           const std::vector<StageTiming>& timings) {
  json m;
  m["command"] = command;
  // The output location does not change the experiment.
  json keyed = config;
  keyed.erase("out");
  m["config_hash"] = hex64(config_hash(keyed));
  m["tool_version"] = kToolVersion;
  json t = json::array();
  for (const auto& s : timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  m["timings"] = t;
  std::vector<std::string> files = out.files();
  files.push_back("manifest.json");
  m["files"] = files;
  out.write("manifest.json", m.dump(2) + "\n");
}

inline void write_points_csv(std::ostream& os, const std::vector<Point>& pts, int dim,
                             const std::vector<int>* labels = nullptr) {
  os.precision(17);
  for (int k = 0; k < dim; ++k) os << (k ? ",x" : "x") << k;
  if (labels) os << ",y";
  os << '\n';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int k = 0; k < dim; ++k) os << (k ? "," : "") << pts[i][k];
    if (labels) os << ',' << (*labels)[i];
    os << '\n';
  }
}

}  // namespace detail

struct FitInputs {
  std::optional<std::vector<Point>> unlabeled;  // overrides oracle sampling
  std::optional<LabeledSample> labeled;
};

// Labeled CSV: coordinate columns followed by a 0/1 label column.
inline LabeledSample read_labeled_csv(const std::string& text, int dim, const std::string& source) {
  const io::CsvTable t = io::parse_csv(text, source);
  if (static_cast<int>(t.header.size()) != dim + 1)
    throw IoError(source + ": expected " + std::to_string(dim) + " coordinates and a label");
  LabeledSample s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = source + ":" + std::to_string(t.line_numbers[r]);
    Point p{};
    for (int k = 0; k < dim; ++k) p[k] = io::parse_double(t.rows[r][k], where);
    const std::string& y = t.rows[r][dim];
    if (y != "0" && y != "1") throw IoError(where + ": label must be 0 or 1");
    s.points.push_back(p);
    s.labels.push_back(y == "1" ? 1 : 0);
  }
  return s;
}

// sample -> KDE -> penalized level set -> clip -> components -> merge -> vote.
inline CommandResult cmd_fit(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                             const FitInputs& inputs = {}) {
  CommandResult result;
  const GridDomain dom = cfg.oracle.grid(cfg.resolution);
  const std::size_t n = cfg.n_values.front();
  const std::size_t m = cfg.m_values.front();
  std::vector<StageTiming> timings;
  detail::StageClock clock(timings);

  std::vector<Point> unlabeled;
  if (inputs.unlabeled) {
    unlabeled = *inputs.unlabeled;
  } else {
    Rng urng(derive_seed(cfg.seed, 0, Stream::unlabeled));
    unlabeled = cfg.oracle.sample_points(m, urng);
  }
  LabeledSample labeled;
  if (inputs.labeled) {
    labeled = *inputs.labeled;
  } else {
    Rng lrng(derive_seed(cfg.seed, 0, Stream::labeled));
    labeled = cfg.oracle.sample_labeled(n, lrng);
  }
  for (std::size_t i = 0; i < unlabeled.size(); ++i)
    if (!dom.contains(unlabeled[i]))
      throw IoError("unlabeled point " + std::to_string(i) + " lies outside the domain");
  for (std::size_t i = 0; i < labeled.size(); ++i)
    if (!dom.contains(labeled.points[i]))
      throw IoError("labeled point " + std::to_string(i) + " lies outside the domain");
  clock.mark("sample");

  const OracleView view = make_oracle_view(cfg.oracle, cfg.level, dom);
  const PipelineSettings settings = PipelineSettings::from(cfg, cfg.level);
  Estimation est = estimate_regions(unlabeled, settings, dom);
  for (const auto& t : est.timings) timings.push_back(t);
  clock.mark("estimation_total");

  const RegionLabeling& regions = cfg.population ? view.truth : est.regions;
  const ClusterVoteModel model =
      cfg.population ? fit_population(regions, labeled) : fit(regions, labeled);
  clock.mark("vote");
  if (regions.num_regions() == 0)
    result.warnings.push_back("estimated level set is empty; every point will be rejected");

  detail::OutputDir out(out_dir);
  json mj;
  mj["format"] = "sslc-model";
  mj["version"] = 1;
  mj["mode"] = cfg.population ? "population" : "semi_supervised";
  mj["domain"] = detail::domain_to_json(dom);
  mj["lambda"] = cfg.level;
  mj["penalty"] = est.ell;
  mj["alpha"] = est.alpha;
  mj["tau"] = est.tau;
  mj["n"] = labeled.size();
  mj["m"] = unlabeled.size();
  mj["reject_label"] = "R";
  mj["regions_file"] = "regions.csv";
  json regs = json::array();
  for (std::size_t k = 0; k < model.region_label.size(); ++k)
    regs.push_back({{"id", k},
                    {"label", label_str(model.region_label[k])},
                    {"votes", model.votes[k]},
                    {"count", model.counts[k]}});
  mj["regions"] = regs;
  mj["removed_by_clip"] = est.clipped.removed_measure;
  out.write("model.json", mj.dump(2) + "\n");
  out.write_with("model.csv", [&](std::ostream& os) { write_model_csv(os, model); });
  out.write_with("regions.csv", [&](std::ostream& os) { write_labeling_csv(os, model.regions); });
  out.write_with("estimate.gridset", [&](std::ostream& os) { write_gridset(os, est.clipped.set); });
  out.write_with("density.csv", [&](std::ostream& os) { write_density_csv(os, *est.density); });
  out.write("match.json", to_json(match_components(view.truth, est.regions)).dump(2) + "\n");
  out.write_with("unlabeled.csv",
                 [&](std::ostream& os) { detail::write_points_csv(os, unlabeled, dom.dim()); });
  out.write_with("labeled.csv", [&](std::ostream& os) {
    detail::write_points_csv(os, labeled.points, dom.dim(), &labeled.labels);
  });
  detail::write_manifest(out, "fit", to_json(cfg), timings);
  result.files = out.files();
  return result;
}

inline ClusterVoteModel load_model(const std::filesystem::path& dir) {
  json mj;
  try {
    mj = json::parse(io::read_file(dir / "model.json"));
  } catch (const json::exception& e) {
    throw IoError("model.json: " + std::string(e.what()));
  }
  if (mj.value("format", "") != "sslc-model") throw IoError("model.json: not an sslc model");
  const GridDomain dom = detail::domain_from_json(mj.at("domain"));
  const std::string regions_file = mj.value("regions_file", "regions.csv");
  const io::CsvTable t = io::parse_csv(io::read_file(dir / regions_file), regions_file);
  if (t.column("cell") != 0 || t.column("component") != 1 || t.column("region") != 2)
    throw IoError(regions_file + ": expected columns cell,component,region");

  ClusterVoteModel model;
  model.mode = mj.value("mode", "") == "population" ? VoteMode::population
                                                    : VoteMode::semi_supervised;
  RegionLabeling& lab = model.regions;
  lab.source = GridSet(dom);
  lab.component_of.assign(dom.num_cells(), -1);
  lab.tau = mj.value("tau", 0.0);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = regions_file + ":" + std::to_string(t.line_numbers[r]);
    const auto cell = static_cast<CellIndex>(io::parse_double(t.rows[r][0], where));
    const int comp = static_cast<int>(io::parse_double(t.rows[r][1], where));
    const int region = static_cast<int>(io::parse_double(t.rows[r][2], where));
    if (cell >= dom.num_cells() || comp < 0 || region < 0) throw IoError(where + ": out of range");
    if (static_cast<std::size_t>(comp) >= lab.components.size()) {
      lab.components.resize(comp + 1);
      lab.region_of_component.resize(comp + 1, -1);
    }
    lab.components[comp].push_back(cell);
    lab.region_of_component[comp] = region;
    lab.component_of[cell] = comp;
    lab.source.insert(cell);
  }
  const json& regs = mj.at("regions");
  lab.regions.assign(regs.size(), {});
  for (std::size_t l = 0; l < lab.components.size(); ++l) {
    const int k = lab.region_of_component[l];
    if (k < 0 || static_cast<std::size_t>(k) >= regs.size())
      throw IoError(regions_file + ": region id without a model entry");
    lab.regions[k].push_back(static_cast<int>(l));
  }
  for (const json& r : regs) {
    model.region_label.push_back(parse_label(r.at("label").get<std::string>()));
    model.votes.push_back(r.at("votes").get<long>());
    model.counts.push_back(r.at("count").get<std::size_t>());
  }
  return model;
}

// One label per input row, in input order.
inline std::string cmd_eval(const ClusterVoteModel& model, const std::string& points_text,
                            const std::string& source = "points") {
  const GridDomain& dom = model.domain();
  const io::CsvTable t = io::parse_csv(points_text, source);
  if (static_cast<int>(t.header.size()) != dom.dim())
    throw IoError(source + ": expected " + std::to_string(dom.dim()) + " coordinate columns");
  std::ostringstream os;
  os << "label\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = source + ":" + std::to_string(t.line_numbers[r]);
    Point p{};
    for (int k = 0; k < dom.dim(); ++k) p[k] = io::parse_double(t.rows[r][k], where);
    if (!dom.contains(p))
      throw IoError(where + ": point (row " + std::to_string(r + 1) + ") lies outside the domain");
    os << label_str(predict(model, p)) << '\n';
  }
  return os.str();
}

inline CommandResult cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::vector<StageTiming> timings;
  detail::StageClock clock(timings);
  const SweepResult res = run_sweep(cfg);
  clock.mark("sweep");
  detail::OutputDir out(out_dir);
  out.write_with("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, res); });
  out.write_with("sweep_fits.csv", [&](std::ostream& os) { write_sweep_fits_csv(os, res); });
  detail::write_manifest(out, "sweep", to_json(cfg), timings);
  CommandResult result;
  result.files = out.files();
  return result;
}

// Reshapes sweep CSVs into gnuplot-ready blocks:
//   risk_vs_n.dat      one block per (lambda, m): n risk se thm1_bound
//   symdiff_vs_m.dat   one block per lambda: m symdiff_mean
//   bound_overlay.dat  one block per (lambda, m): n thm1 recomputed from deltas
inline CommandResult cmd_report(const std::vector<std::filesystem::path>& inputs,
                                const std::filesystem::path& out_dir) {
  struct Row {
    double level, n, m, risk, se, thm1, symdiff;
    std::vector<double> deltas;
  };
  std::vector<Row> rows;
  for (const auto& path : inputs) {
    const std::string src = path.filename().string();
    const io::CsvTable t = io::parse_csv(io::read_file(path), src);
    std::map<std::string, int> col;
    for (const char* name : {"n", "m", "risk", "se", "thm1_bound", "symdiff_mean", "deltas"}) {
      const int c = t.column(name);
      if (c < 0) throw IoError(src + ": missing column '" + std::string(name) + "'");
      col[name] = c;
    }
    const int lc = t.column("lambda");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& f = t.rows[r];
      const std::string where = src + ":" + std::to_string(t.line_numbers[r]);
      Row row{};
      row.level = lc >= 0 ? io::parse_double(f[lc], where) : 0.0;
      row.n = io::parse_double(f[col["n"]], where);
      row.m = io::parse_double(f[col["m"]], where);
      row.risk = io::parse_double(f[col["risk"]], where);
      row.se = io::parse_double(f[col["se"]], where);
      row.thm1 = io::parse_double(f[col["thm1_bound"]], where);
      row.symdiff = io::parse_double(f[col["symdiff_mean"]], where);
      if (!f[col["deltas"]].empty())
        for (const auto& d : io::split(f[col["deltas"]], ';'))
          row.deltas.push_back(io::parse_double(d, where));
      rows.push_back(std::move(row));
    }
  }
  CommandResult result;
  if (rows.empty()) result.warnings.push_back("no data rows in the sweep input; series are empty");

  std::map<std::pair<double, double>, std::vector<const Row*>> by_level_m;
  std::map<double, std::map<double, double>> symdiff;
  for (const Row& r : rows) {
    by_level_m[{r.level, r.m}].push_back(&r);
    symdiff[r.level].try_emplace(r.m, r.symdiff);
  }
  for (auto& [key, v] : by_level_m)
    std::stable_sort(v.begin(), v.end(), [](const Row* a, const Row* b) { return a->n < b->n; });

  detail::OutputDir out(out_dir);
  out.write_with("risk_vs_n.dat", [&](std::ostream& os) {
    os.precision(10);
    for (const auto& [key, v] : by_level_m) {
      os << "# lambda=" << key.first << " m=" << key.second << "\n# n risk se thm1_bound\n";
      for (const Row* r : v) os << r->n << ' ' << r->risk << ' ' << r->se << ' ' << r->thm1 << '\n';
      os << "\n\n";
    }
  });
  out.write_with("symdiff_vs_m.dat", [&](std::ostream& os) {
    os.precision(10);
    for (const auto& [level, series] : symdiff) {
      os << "# lambda=" << level << "\n# m symdiff_mean\n";
      for (const auto& [m, s] : series) os << m << ' ' << s << '\n';
      os << "\n\n";
    }
  });
  out.write_with("bound_overlay.dat", [&](std::ostream& os) {
    os.precision(10);
    for (const auto& [key, v] : by_level_m) {
      os << "# lambda=" << key.first << " m=" << key.second << "\n# n thm1_recomputed\n";
      for (const Row* r : v)
        os << r->n << ' ' << theorem1_bound(r->deltas, r->n).general << '\n';
      os << "\n\n";
    }
  });
  out.write("plots.gp",
            "set terminal pngcairo size 900,600\n"
            "set output 'risk_vs_n.png'\nset logscale y\nset xlabel 'n'\nset ylabel 'risk'\n"
            "plot 'risk_vs_n.dat' index 0 using 1:2:3 with yerrorlines title 'risk', \\\n"
            "     'bound_overlay.dat' index 0 using 1:2 with lines title 'bound'\n"
            "set output 'symdiff_vs_m.png'\nset logscale xy\nset xlabel 'm'\n"
            "set ylabel 'symdiff'\nplot 'symdiff_vs_m.dat' index 0 using 1:2 with linespoints "
            "notitle\n");
  result.files = out.files();
  return result;
}

}  // namespace sslc
