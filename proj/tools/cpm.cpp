// Command-line front end: fit, predict, simulate, generate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpm/error.hpp"
#include "cpm/io.hpp"
#include "cpm/simulation.hpp"
#include "cpm/solver.hpp"

#ifndef CPM_VERSION
#define CPM_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;

// Exit statuses: 0 success, 1 computational failure, 2 usage or input error.
int exit_status(cpm::ErrorKind kind) {
  using K = cpm::ErrorKind;
  switch (kind) {
    case K::Io:
    case K::ParseError:
    case K::UnknownCensorCode:
    case K::UnknownProfileColumn:
    case K::SchemaError:
    case K::UnknownScenario:
    case K::InvalidArgument:
    case K::InvalidProbability:
    case K::UnsupportedLink:
      return 2;
    default:
      return 1;
  }
}

void report(const cpm::Error& e) {
  json err = {{"error", {{"kind", cpm::to_string(e.kind())}, {"message", e.what()}}}};
  std::cerr << err.dump() << '\n';
}

// Writes to the file, or stdout when path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cpm::Error(cpm::ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

struct FitArgs {
  std::string data, link, config, out, covariates;
  double level = 0.95;
};

int run_fit(const FitArgs& a, const CLI::App& cmd) {
  cpm::RunConfig cfg;
  if (!a.config.empty()) cfg = cpm::read_run_config(a.config);
  if (cmd.count("--link")) cfg.link = cpm::parse_link(a.link).name();
  if (cmd.count("--covariates")) cfg.covariates = split_list(a.covariates);
  if (cmd.count("--level")) cfg.level = a.level;
  cfg.validate();
  auto ds = cpm::read_csv(a.data).to_dataset();
  if (!cfg.covariates.empty()) ds = ds.select_covariates(cfg.covariates);
  const auto m = cpm::fit(ds, cpm::LinkFunction(cfg.link), cfg.fit);
  emit(a.out, cpm::fit_to_json(m, cfg.level).dump(2) + "\n");
  return 0;
}

struct PredictArgs {
  std::string fit, profile, format = "json", out;
  std::vector<double> cdf_at, quantiles;
  double level = 0.95;
};

int run_predict(const PredictArgs& a) {
  std::ifstream in(a.fit, std::ios::binary);
  if (!in) throw cpm::Error(cpm::ErrorKind::Io, "cannot open '" + a.fit + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw cpm::Error(cpm::ErrorKind::ParseError, a.fit + ": " + e.what());
  }
  const cpm::ModelFit m = cpm::fit_from_json(doc);
  cpm::PredictionRequest req;
  req.level = a.level;
  req.cdf_at = a.cdf_at;
  req.quantiles = a.quantiles;
  if (!a.profile.empty()) {
    req.profiles = cpm::read_profiles(a.profile, m.covariate_names);
  } else if (m.covariate_names.empty()) {
    req.profiles = {Eigen::VectorXd(0)};
  } else {
    throw cpm::Error(cpm::ErrorKind::InvalidArgument, "--profile is required for a model with covariates");
  }
  const json pred = cpm::predict_to_json(m, req);
  if (a.format == "csv") {
    std::ostringstream s;
    cpm::write_predictions_csv(s, pred);
    emit(a.out, s.str());
  } else {
    emit(a.out, pred.dump(2) + "\n");
  }
  return 0;
}

struct SimulateArgs {
  std::string family = "single", link = "probit", estimators = "cpm", out;
  int scenario = 1, n = 100, reps = 1000, threads = 0;
  std::uint64_t seed = 20240101;
};

int run_simulate(const SimulateArgs& a) {
  cpm::ScenarioSpec spec{cpm::parse_family(a.family), a.scenario, a.n, cpm::parse_link(a.link).name(), a.reps, a.seed};
  std::vector<cpm::Estimator> est;
  for (const auto& e : split_list(a.estimators)) est.push_back(cpm::parse_estimator(e));
  const auto res = cpm::run_study(spec, est, a.threads);
  std::ostringstream csv;
  cpm::write_metrics_csv(csv, res);
  const json manifest = cpm::manifest_to_json(res, CPM_VERSION);
  if (a.out.empty()) {
    std::cout << csv.str();
    std::cerr << manifest.dump() << '\n';
    return 0;
  }
  std::filesystem::create_directories(a.out);
  const std::filesystem::path dir(a.out);
  emit((dir / "metrics.csv").string(), csv.str());
  emit((dir / "metrics.json").string(), cpm::metrics_to_json(res).dump(2) + "\n");
  emit((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  return 0;
}

struct GenerateArgs {
  std::string family = "single", out;
  int scenario = 1, n = 100;
  std::uint64_t seed = 20240101, replicate = 0;
};

int run_generate(const GenerateArgs& a) {
  const cpm::ScenarioSpec spec{cpm::parse_family(a.family), a.scenario, a.n, cpm::LinkName::Probit, 1, a.seed};
  spec.validate();
  std::ostringstream s;
  cpm::write_dataset_csv(s, cpm::generate(spec, a.replicate));
  emit(a.out, s.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cumulative probability models for outcomes censored at detection limits"};
  app.set_version_flag("--version", CPM_VERSION);
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "fit a CPM to a CSV file and write a JSON result document");
  fit_cmd->add_option("--data", fa.data, "CSV: outcome, censor code, covariates")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--link", fa.link, "logit | probit | loglog | cloglog (default probit)");
  fit_cmd->add_option("--config", fa.config, "JSON run configuration")->check(CLI::ExistingFile);
  fit_cmd->add_option("--covariates", fa.covariates, "comma-separated subset of covariate columns");
  fit_cmd->add_option("--level", fa.level, "confidence level")->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--out", fa.out, "output file (default stdout)");

  PredictArgs pa;
  auto* pred_cmd = app.add_subcommand("predict", "conditional CDFs and quantiles from a fit document");
  pred_cmd->add_option("--fit", pa.fit, "fit document written by `fit`")->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--profile", pa.profile, "CSV of covariate profiles, one per row");
  pred_cmd->add_option("--cdf-at", pa.cdf_at, "outcome values y for F(y | x)");
  pred_cmd->add_option("--quantile", pa.quantiles, "probabilities p for Q(p | x)");
  pred_cmd->add_option("--level", pa.level, "confidence level")->check(CLI::Range(0.0, 1.0));
  pred_cmd->add_option("--format", pa.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  pred_cmd->add_option("--out", pa.out, "output file (default stdout)");

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study: metrics table and manifest");
  sim_cmd->add_option("--family", sa.family, "single | multi | misspec")->required();
  sim_cmd->add_option("--scenario", sa.scenario, "scenario id within the family");
  sim_cmd->add_option("--n", sa.n, "sample size (per site for multi)");
  sim_cmd->add_option("--reps", sa.reps, "replicates");
  sim_cmd->add_option("--seed", sa.seed, "RNG seed");
  sim_cmd->add_option("--link", sa.link, "link used by the CPM fit");
  sim_cmd->add_option("--estimators", sa.estimators, "cpm,impute_dl,impute_half,impute_sqrt2,mle");
  sim_cmd->add_option("--threads", sa.threads, "worker threads (default CPM_THREADS or all cores)");
  sim_cmd->add_option("--out", sa.out, "output directory (default: CSV on stdout, manifest on stderr)");

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "write one simulated replicate as CSV");
  gen_cmd->add_option("--family", ga.family, "single | multi | misspec")->required();
  gen_cmd->add_option("--scenario", ga.scenario, "scenario id within the family");
  gen_cmd->add_option("--n", ga.n, "sample size (per site for multi)");
  gen_cmd->add_option("--seed", ga.seed, "RNG seed");
  gen_cmd->add_option("--replicate", ga.replicate, "replicate index");
  gen_cmd->add_option("--out", ga.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) return run_fit(fa, *fit_cmd);
    if (*pred_cmd) return run_predict(pa);
    if (*sim_cmd) return run_simulate(sa);
    if (*gen_cmd) return run_generate(ga);
  } catch (const cpm::Error& e) {
    report(e);
    return exit_status(e.kind());
  } catch (const std::exception& e) {
    report(cpm::Error(cpm::ErrorKind::Io, e.what()));
    return 1;
  }
  return 2;
}
