// sslc: command-line front end for the cluster-vote classifier.
//
//   sslc fit    --config cfg.json [--seed S] [--out DIR] [--population]
//   sslc sweep  --config cfg.json [--seed S] [--out DIR] [--population]
//   sslc eval   --model DIR --points pts.csv [--out labels.csv]
//   sslc report --input sweep.csv [--input ...] --out DIR
//   sslc oracles [--show NAME]
//
// Failures print one line "error[<kind>]: <message>" on stderr and exit with
// 2 (config), 3 (infeasible) or 4 (io).

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sslc/commands.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool population = false;
};

sslc::ExperimentConfig load_config(const CommonOpts& o) {
  sslc::json j;
  try {
    j = sslc::json::parse(sslc::io::read_file(o.config));
  } catch (const sslc::json::parse_error& e) {
    throw sslc::ConfigError(o.config + ": invalid JSON: " + e.what());
  }
  if (o.seed && j.is_object()) j["seed"] = *o.seed;
  if (o.population && j.is_object()) j["population"] = true;
  sslc::ExperimentConfig cfg = sslc::experiment_from_json(j);
  if (!o.out.empty()) cfg.out = o.out;
  return cfg;
}

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config, "experiment config (JSON)")->required();
  sub->add_option("--seed", o.seed, "override the config seed");
  sub->add_option("--out", o.out, "output directory (overrides config.out)");
  sub->add_flag("--population", o.population, "vote on the true components (known density)");
}

void print_files(const sslc::CommandResult& r, const std::string& dir) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : r.files) std::cout << dir << '/' << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sslc: semi-supervised classification under the cluster assumption"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sslc::kToolVersion);

  CommonOpts fit_opts, sweep_opts;
  std::string unlabeled_csv, labeled_csv;
  auto* fit = app.add_subcommand("fit", "estimate regions and fit the vote classifier");
  add_common(fit, fit_opts);
  fit->add_option("--unlabeled", unlabeled_csv, "unlabeled points CSV (default: sample the oracle)");
  fit->add_option("--labeled", labeled_csv, "labeled points CSV with a final 0/1 column");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo rate sweep over the n and m lists");
  add_common(sweep, sweep_opts);

  std::string model_dir, points_csv, eval_out;
  auto* eval = app.add_subcommand("eval", "label points with a fitted model");
  eval->add_option("--model", model_dir, "directory written by fit")->required();
  eval->add_option("--points", points_csv, "points CSV, one coordinate column per axis")->required();
  eval->add_option("--out", eval_out, "output CSV (default: stdout)");

  std::vector<std::string> report_inputs;
  std::string report_out = "report";
  auto* report = app.add_subcommand("report", "reshape sweep CSVs into plot data");
  report->add_option("--input", report_inputs, "sweep CSV (repeatable)")->required();
  report->add_option("--out", report_out, "output directory");

  std::string show;
  auto* oracles = app.add_subcommand("oracles", "list shipped oracles");
  oracles->add_option("--show", show, "print the JSON of one oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[config]: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit) {
      const auto cfg = load_config(fit_opts);
      sslc::FitInputs in;
      const int dim = cfg.oracle.dim;
      if (!unlabeled_csv.empty())
        in.unlabeled = sslc::io::read_points_csv(sslc::io::read_file(unlabeled_csv), dim, unlabeled_csv);
      if (!labeled_csv.empty())
        in.labeled = sslc::read_labeled_csv(sslc::io::read_file(labeled_csv), dim, labeled_csv);
      print_files(sslc::cmd_fit(cfg, cfg.out, in), cfg.out);
    } else if (*sweep) {
      const auto cfg = load_config(sweep_opts);
      print_files(sslc::cmd_sweep(cfg, cfg.out), cfg.out);
    } else if (*eval) {
      const auto model = sslc::load_model(model_dir);
      const std::string labels =
          sslc::cmd_eval(model, sslc::io::read_file(points_csv), points_csv);
      if (eval_out.empty()) std::cout << labels;
      else sslc::io::write_file(eval_out, labels);
    } else if (*report) {
      std::vector<std::filesystem::path> paths(report_inputs.begin(), report_inputs.end());
      print_files(sslc::cmd_report(paths, report_out), report_out);
    } else if (*oracles) {
      if (show.empty()) {
        for (const auto& name : sslc::shipped_oracle_names()) {
          const auto d = sslc::shipped_oracle(name);
          std::cout << name << "\tdim=" << d.dim << "\tbumps=" << d.bumps.size()
                    << "\tlambda*=" << d.lambda_star << '\n';
        }
      } else {
        std::cout << sslc::to_json(sslc::shipped_oracle(show)).dump(2) << '\n';
      }
    }
  } catch (const sslc::Error& e) {
    std::cerr << "error[" << sslc::error_tag(e.kind()) << "]: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error[io]: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    // Library preconditions surfacing from user input are config problems.
    std::cerr << "error[config]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
