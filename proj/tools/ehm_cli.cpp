// ehm: simulate cohorts, fit intensity models, and run Wald inference and
// Monte Carlo studies for the four-state stroke/dementia event-history model.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehm/aggregate.hpp"
#include "ehm/estimate.hpp"
#include "ehm/inference.hpp"
#include "ehm/io.hpp"
#include "ehm/likelihood.hpp"
#include "ehm/montecarlo.hpp"
#include "ehm/svg.hpp"
#include "ehm/trajectory.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 validation, 2 numeric/refusal, 3 I/O.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

struct CliFailure {
  int code;
  std::string message;
};

ehm::TransitionKind parse_transition_or_fail(const std::string& code) {
  const auto k = ehm::parse_transition(code);
  if (!k) throw CliFailure{kExitValidation, "unknown transition code '" + code + "'"};
  return *k;
}

std::string num(double x) { return ehm::format_number(x); }

json rates_json(const ehm::PiecewiseRateSet& rates) {
  json out;
  out["partition"] = rates.partition().breakpoints();
  json cells = json::array();
  for (std::size_t l = 0; l < rates.partition().intervals(); ++l) {
    json cell;
    for (ehm::TransitionKind k : ehm::kAllTransitions) {
      cell[std::string(ehm::transition_code(k))] = rates.interval_rates(l)[k];
    }
    cells.push_back(cell);
  }
  out["intervals"] = cells;
  return out;
}

json scheme_json(const ehm::ObservationScheme& scheme) {
  json out;
  out["tau"] = scheme.tau;
  out["window"] = scheme.window;
  switch (scheme.entry_age.kind()) {
    case ehm::EntryAgeDist::Kind::Uniform:
      out["entry_age"] = {{"kind", "uniform"},
                          {"lo", scheme.entry_age.params()[0]},
                          {"hi", scheme.entry_age.params()[1]}};
      break;
    case ehm::EntryAgeDist::Kind::Degenerate:
      out["entry_age"] = {{"kind", "degenerate"}, {"at", scheme.entry_age.params()[0]}};
      break;
    case ehm::EntryAgeDist::Kind::Empirical:
      out["entry_age"] = {{"kind", "empirical"}, {"values", scheme.entry_age.params()}};
      break;
  }
  return out;
}

json contrast_json(const ehm::ContrastResult& r) {
  return json{{"diff", r.diff},    {"se", r.se}, {"level", r.level}, {"ci_lo", r.ci_lo},
              {"ci_hi", r.ci_hi},  {"z", r.z},   {"p_value", r.p_value}};
}

void print_fit_table(const ehm::FitResult& fit, double level, std::ostream& out) {
  out << "transition   interval        events      exposure          rate            se"
         "         ci_lo         ci_hi\n";
  char buf[256];
  for (const ehm::ParamFit& cell : fit.params) {
    char ibuf[64];
    std::snprintf(ibuf, sizeof ibuf, "]%g,%g]", cell.interval_lo, cell.interval_hi);
    const std::string interval = ibuf;
    if (cell.status == ehm::CellStatus::NoExposure) {
      std::snprintf(buf, sizeof buf, "%-12s %-12s %9ld %13.6g %13s %13s %13s %13s\n",
                    std::string(ehm::transition_code(cell.kind)).c_str(), interval.c_str(),
                    cell.events, cell.exposure, "NA", "NA", "NA", "NA");
    } else {
      const auto [lo, hi] = ehm::wald_ci(cell, level);
      std::snprintf(buf, sizeof buf, "%-12s %-12s %9ld %13.6g %13.6g %13.6g %13.6g %13.6g\n",
                    std::string(ehm::transition_code(cell.kind)).c_str(), interval.c_str(),
                    cell.events, cell.exposure, cell.estimate, cell.se, lo, hi);
    }
    out << buf;
  }
}

void print_mortality_table(const ehm::MortalityFit& fit, double level, std::ostream& out) {
  out << "two-state mortality model (alive -> d)\n";
  out << "  deaths observed   " << fit.n_uncens << "\n";
  out << "  censored          " << fit.n_cens << "\n";
  out << "  uncensored time   " << num(fit.uncensored_time) << "\n";
  out << "  time at risk      " << num(fit.time_at_risk) << "\n";
  if (fit.status == ehm::CellStatus::NoExposure) {
    out << "  rate              NA\n";
    return;
  }
  const auto [lo, hi] = ehm::wald_ci(fit.estimate, fit.se, level);
  out << "  rate              " << num(fit.estimate) << "\n";
  out << "  se                " << num(fit.se) << "\n";
  out << "  " << 100.0 * level << "% CI           [" << num(lo) << ", " << num(hi) << "]\n";
}

ehm::FitResult mortality_as_fit(const ehm::MortalityFit& m, double window) {
  ehm::FitResult fit;
  fit.model = ehm::FitResult::Model::Mortality;
  ehm::ParamFit cell;
  cell.kind = ehm::TransitionKind::HealthyToDead;  // placeholder kind; row prints "alive-d"
  cell.interval_lo = 0.0;
  cell.interval_hi = window;
  cell.events = m.n_uncens;
  cell.exposure = m.time_at_risk;
  cell.estimate = m.estimate;
  cell.se = m.se;
  cell.status = m.status;
  fit.params.push_back(cell);
  return fit;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  ehm::RunConfig config = ehm::read_config(config_path);
  if (seed_override) config.seed = *seed_override;
  config.validate();

  const ehm::Cohort cohort =
      ehm::sample_cohort(config.rates, config.scheme, config.n_all, config.seed);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw CliFailure{kExitIo, "cannot create " + out_dir + ": " + ec.message()};

  ehm::write_cohort(cohort.records, fs::path(out_dir) / "persons.csv",
                    fs::path(out_dir) / "events.csv");

  json truth;
  truth["rates"] = rates_json(config.rates);
  truth["scheme"] = scheme_json(config.scheme);
  truth["n_all"] = config.n_all;
  truth["seed"] = config.seed;
  std::ofstream tf(fs::path(out_dir) / "truth.json");
  if (!tf) throw CliFailure{kExitIo, "cannot write truth.json in " + out_dir};
  tf << truth.dump(2) << "\n";

  std::cout << "n_all     " << cohort.summary.n_all << "\n";
  std::cout << "n         " << cohort.summary.n << "\n";
  std::cout << "truncated " << cohort.summary.truncated << "\n";
  std::cout << "beta_hat  " << num(cohort.summary.beta_hat) << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& persons, const std::string& events,
            const std::vector<double>& partition_breaks, bool mortality, double window,
            double level, const std::string& out_file) {
  const auto records = ehm::read_cohort(persons, events);

  if (mortality) {
    if (!partition_breaks.empty()) {
      throw CliFailure{kExitValidation, "--partition cannot be combined with --model mortality"};
    }
    std::vector<ehm::SurvivalRecord> survival;
    survival.reserve(records.size());
    for (const auto& rec : records) {
      survival.push_back(ehm::collapse_to_survival(rec));
    }
    const ehm::MortalityFit m = ehm::fit_mortality(survival, window);
    const ehm::FitResult fit = mortality_as_fit(m, window);
    if (!out_file.empty()) ehm::write_fit(fit, level, out_file);
    print_mortality_table(m, level, std::cout);
    return kExitOk;
  }

  ehm::FitResult fit;
  if (partition_breaks.empty()) {
    double horizon = 0.0;
    for (const auto& rec : records) horizon = std::max(horizon, rec.exit_age);
    fit = ehm::fit_homogeneous(ehm::aggregate_homogeneous(records), horizon);
  } else {
    const ehm::Partition partition(partition_breaks);
    fit = ehm::fit_piecewise(ehm::aggregate_piecewise(records, partition));
  }
  if (!out_file.empty()) ehm::write_fit(fit, level, out_file);
  print_fit_table(fit, level, std::cout);
  return kExitOk;
}

int cmd_loglik(const std::string& persons, const std::string& events,
               const std::string& config_path) {
  const auto records = ehm::read_cohort(persons, events);
  const ehm::RunConfig config = ehm::read_config(config_path);

  ehm::LogLikValue ll;
  if (config.rates.is_homogeneous()) {
    ll = ehm::loglik(ehm::aggregate_homogeneous(records), config.rates.interval_rates(0));
  } else {
    ll = ehm::loglik_piecewise(ehm::aggregate_piecewise(records, config.rates.partition()),
                               config.rates);
  }
  json out;
  out["value"] = ll.value;
  out["log_zero"] = ll.log_zero;
  out["score"] = ll.score;
  out["hessian"] = ll.hessian;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_contrast(const std::string& fit_file, const std::string& code_a,
                 const std::string& code_b, std::optional<long> interval, double level) {
  const ehm::FitResult fit = ehm::read_fit(fit_file);
  const ehm::TransitionKind a = parse_transition_or_fail(code_a);
  const ehm::TransitionKind b = parse_transition_or_fail(code_b);

  json out;
  if (fit.model == ehm::FitResult::Model::Piecewise && !interval) {
    const ehm::PairwiseTests tests = ehm::pairwise_age_tests(fit, a, b, level);
    out["a"] = code_a;
    out["b"] = code_b;
    out["comparisons"] = tests.comparisons;
    json rows = json::array();
    for (const ehm::IntervalContrast& ic : tests.intervals) {
      json row;
      row["interval_lo"] = ic.interval_lo;
      row["interval_hi"] = ic.interval_hi;
      row["skipped"] = ic.skipped;
      if (!ic.skipped) row["contrast"] = contrast_json(ic.result);
      rows.push_back(row);
    }
    out["intervals"] = rows;
  } else {
    const std::size_t l = interval ? static_cast<std::size_t>(*interval) : 0;
    const ehm::ParamFit& cell_a = fit.at(a, l);
    const ehm::ParamFit& cell_b = fit.at(b, l);
    out["a"] = code_a;
    out["b"] = code_b;
    out["contrast"] = contrast_json(ehm::contrast(cell_a, cell_b, level));
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_coverage(const std::string& config_path, std::optional<int> reps, double level,
                 bool strict, std::optional<std::uint64_t> seed_override,
                 const std::string& json_file) {
  ehm::RunConfig config = ehm::read_config(config_path);
  if (reps) config.replications = *reps;
  if (seed_override) config.seed = *seed_override;

  const ehm::CoverageReport report = ehm::coverage_study(config, level);

  std::printf("coverage study: n_all=%ld R=%d level=%g seed=%llu reruns=%d\n", report.n_all,
              report.replications, report.level, static_cast<unsigned long long>(report.seed),
              report.reruns);
  std::printf("beta oracle %.6f  mean beta_hat %.6f  mean n %.1f\n", report.beta_oracle,
              report.beta_mean, report.mean_n);
  std::printf("%-6s %10s %10s %11s %10s %10s %9s %7s %7s %8s %s\n", "rate", "truth", "mean",
              "bias", "mc_sd", "mean_se", "coverage", "skew", "exkurt", "ks", "ks_reject");
  for (const ehm::ParamCoverage& pc : report.params) {
    std::printf("%-6s %10.6f %10.6f %11.2e %10.2e %10.2e %9.4f %7.3f %7.3f %8.4f %s\n",
                std::string(ehm::transition_code(pc.kind)).c_str(), pc.truth, pc.mean_estimate,
                pc.bias, pc.mc_sd, pc.mean_se, pc.coverage, pc.skewness, pc.excess_kurtosis,
                pc.ks_distance, pc.ks_reject ? "REJECT" : "ok");
  }

  json out;
  out["n_all"] = report.n_all;
  out["replications"] = report.replications;
  out["level"] = report.level;
  out["seed"] = report.seed;
  out["reruns"] = report.reruns;
  out["beta_oracle"] = report.beta_oracle;
  out["beta_mean"] = report.beta_mean;
  out["mean_n"] = report.mean_n;
  json params = json::array();
  bool violated = false;
  for (const ehm::ParamCoverage& pc : report.params) {
    json row;
    row["transition"] = std::string(ehm::transition_code(pc.kind));
    row["truth"] = pc.truth;
    row["mean_estimate"] = pc.mean_estimate;
    row["bias"] = pc.bias;
    row["mc_sd"] = pc.mc_sd;
    row["mc_se"] = pc.mc_se;
    row["mean_se"] = pc.mean_se;
    row["coverage"] = pc.coverage;
    row["skewness"] = pc.skewness;
    row["excess_kurtosis"] = pc.excess_kurtosis;
    row["ks_distance"] = pc.ks_distance;
    row["ks_reject"] = pc.ks_reject;
    params.push_back(row);
    const bool cov_ok = pc.coverage >= 0.93 && pc.coverage <= 0.97;
    const bool se_ok = pc.mc_sd > 0.0 && std::abs(pc.mean_se / pc.mc_sd - 1.0) <= 0.10;
    if (!cov_ok || !se_ok || pc.ks_reject) violated = true;
  }
  out["params"] = params;
  if (!json_file.empty()) {
    std::ofstream jf(json_file);
    if (!jf) throw CliFailure{kExitIo, "cannot write " + json_file};
    jf << out.dump(2) << "\n";
  }
  if (strict && violated) {
    std::cerr << "coverage thresholds violated (--strict)\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_report(const std::string& fit_file, const std::string& plot_file, double level) {
  const ehm::FitResult fit = ehm::read_fit(fit_file);
  print_fit_table(fit, level, std::cout);
  if (!plot_file.empty()) {
    if (fit.model != ehm::FitResult::Model::Piecewise) {
      throw CliFailure{kExitNumeric,
                       "--plot needs a piecewise fit; refit with --partition a,b,..."};
    }
    const std::string svg = ehm::render_step_plot(fit, ehm::TransitionKind::StrokeToDementia,
                                                  ehm::TransitionKind::HealthyToDementia, level);
    std::ofstream pf(plot_file);
    if (!pf) throw CliFailure{kExitIo, "cannot write " + plot_file};
    pf << svg;
    std::cout << "plot written to " << plot_file << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-state stroke/dementia event-history model"};
  app.require_subcommand(1);

  std::string config_path, out_dir, persons, events, out_file, fit_file, json_file, plot_file;
  std::string code_a, code_b;
  std::vector<double> partition_breaks;
  bool mortality = false, strict = false;
  double level = 0.95;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> reps;
  std::optional<long> interval;

  auto* simulate = app.add_subcommand("simulate", "Sample an observed cohort");
  simulate->add_option("config", config_path, "run configuration file")->required();
  simulate->add_option("--out", out_dir, "output directory")->required();
  simulate->add_option("--seed", seed_override, "override the config seed");

  auto* fit = app.add_subcommand("fit", "Fit intensities to a cohort");
  fit->add_option("persons", persons, "persons.csv")->required();
  fit->add_option("events", events, "events.csv")->required();
  fit->add_option("--partition", partition_breaks,
                  "breakpoints 0,...,tau for the piecewise model")
      ->delimiter(',');
  std::string model;
  fit->add_option("--model", model, "model variant: mortality (default: multi-state)")
      ->check(CLI::IsMember({"mortality"}));
  double window = 9.0;
  fit->add_option("--window", window, "censoring window for the mortality model");
  fit->add_option("--level", level, "confidence level for the printed table");
  fit->add_option("--out", out_file, "fit output file (CSV schema)");

  auto* loglik = app.add_subcommand("loglik", "Log-likelihood at configured rates");
  loglik->add_option("persons", persons, "persons.csv")->required();
  loglik->add_option("events", events, "events.csv")->required();
  loglik->add_option("--config", config_path, "configuration with the rates")->required();

  auto* contrast_cmd = app.add_subcommand("contrast", "Wald contrast of two rates");
  contrast_cmd->add_option("fit", fit_file, "fit output file")->required();
  contrast_cmd->add_option("--a", code_a, "first transition code, e.g. S1-D")->required();
  contrast_cmd->add_option("--b", code_b, "second transition code, e.g. H-D")->required();
  contrast_cmd->add_option("--interval", interval, "interval index for piecewise fits");
  contrast_cmd->add_option("--level", level, "confidence level");

  auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage study");
  coverage->add_option("config", config_path, "run configuration file")->required();
  coverage->add_option("--reps", reps, "override replication count");
  coverage->add_option("--level", level, "nominal CI level");
  coverage->add_option("--seed", seed_override, "override the config seed");
  coverage->add_option("--json", json_file, "write the report as JSON");
  coverage->add_flag("--strict", strict, "exit nonzero if any threshold is violated");

  auto* report = app.add_subcommand("report", "Summarize a fit file");
  report->add_option("fit", fit_file, "fit output file")->required();
  report->add_option("--plot", plot_file, "write a step plot SVG");
  report->add_option("--level", level, "confidence level");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seed_override);
    if (fit->parsed()) {
      mortality = model == "mortality";
      return cmd_fit(persons, events, partition_breaks, mortality, window, level, out_file);
    }
    if (loglik->parsed()) return cmd_loglik(persons, events, config_path);
    if (contrast_cmd->parsed()) {
      return cmd_contrast(fit_file, code_a, code_b, interval, level);
    }
    if (coverage->parsed()) {
      return cmd_coverage(config_path, reps, level, strict, seed_override, json_file);
    }
    if (report->parsed()) return cmd_report(fit_file, plot_file, level);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const ehm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ehm::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}
