#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "twostream/freq_em.hpp"
#include "twostream/gof.hpp"
#include "twostream/model_io.hpp"
#include "twostream/premium.hpp"
#include "twostream/sev_em.hpp"
#include "twostream/simulate.hpp"

namespace twostream::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Inline JSON object or a path to a file holding one.
json read_json_arg(const std::string &arg) {
  const std::string text = !arg.empty() && arg.front() == '{' ? arg : read_text_file(arg);
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError("cannot parse JSON '" + arg + "': " + e.what());
  }
}

FreqParams freq_from_json(const json &j) {
  FreqParams f{j.at("alpha1").get<double>(), j.at("alpha2").get<double>(),
               j.at("beta").get<double>(), j.at("p").get<double>()};
  validate(f);
  return f;
}

FitMeta meta_from_trace(int iterations, double loglik, double tol, bool converged,
                        FitStatus status) {
  FitMeta m;
  m.iterations = static_cast<std::uint64_t>(iterations);
  m.loglik = loglik;
  m.tol = tol;
  m.converged = converged;
  m.status = to_string(status);
  return m;
}

struct FitFreqArgs {
  std::string counts;
  std::string init = "moments";
  double tol = 1e-3;
  int max_iters = 10000;
  std::string output;
};

int cmd_fit_freq(const FitFreqArgs &a, std::ostream &out, std::ostream &err) {
  std::vector<std::uint64_t> counts;
  for (const auto &r : read_counts_csv(a.counts)) counts.push_back(r.count);
  const CountSample sample(std::move(counts));
  const FreqParams init = a.init == "moments" ? moment_init_freq(sample)
                                              : freq_from_json(read_json_arg(a.init));
  EmOptions opts;
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  const auto fit = fit_freq(sample, init, opts);

  ModelFile model;
  if (fs::exists(a.output)) {
    try {
      model = load_model(a.output);
    } catch (const ParseError &) {
      model = ModelFile{};  // overwrite an unreadable file
    }
  }
  model.freq = fit.params;
  model.freq_fit = meta_from_trace(fit.trace.iterations, fit.trace.loglik_path.back(), a.tol,
                                   fit.trace.converged, fit.trace.status);
  save_model(a.output, model);
  out << "iterations " << fit.trace.iterations << "\n"
      << "loglik " << format_double(fit.trace.loglik_path.back()) << "\n"
      << "status " << to_string(fit.trace.status) << "\n";
  if (!fit.trace.converged) {
    err << "warning: frequency EM did not converge (" << fit.trace.message << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

struct FitSevArgs {
  std::string claims;
  std::string model;
  bool estimate_nu = false;
  std::optional<double> nu_init;
  std::string init;
  double tol = 1e-3;
  int max_iters = 10000;
  std::string output;
};

int cmd_fit_sev(const FitSevArgs &a, std::ostream &out, std::ostream &err) {
  ModelFile model = load_model(a.model);
  if (!model.freq && !a.estimate_nu) {
    throw ParseError(a.model + " has no frequency parameters; fit-freq first or pass --estimate-nu");
  }
  std::vector<double> amounts;
  for (const auto &r : read_claims_csv(a.claims)) amounts.push_back(r.amount);
  const SeveritySample sample(std::move(amounts));

  double nu = model.freq ? nu_from_freq(*model.freq) : 0.5;
  if (a.estimate_nu && a.nu_init) nu = *a.nu_init;
  SevParams init = default_init_sev(sample, nu);
  if (!a.init.empty()) {
    const json j = read_json_arg(a.init);
    init.mu = j.at("mu").get<double>();
    init.delta = j.at("delta").get<double>();
    init.sigma = j.at("sigma").get<double>();
    if (a.estimate_nu && j.contains("nu") && !a.nu_init) init.nu = j.at("nu").get<double>();
    validate(init);
  }
  EmOptions opts;
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  const auto fit = fit_sev(sample, init, a.estimate_nu, opts);

  model.sev = fit.params;
  model.sev_nu_estimated = a.estimate_nu;
  model.sev_fit = meta_from_trace(fit.trace.iterations, fit.trace.loglik_path.back(), a.tol,
                                  fit.trace.converged, fit.trace.status);
  save_model(a.output, model);
  out << "iterations " << fit.trace.iterations << "\n"
      << "loglik " << format_double(fit.trace.loglik_path.back()) << "\n"
      << "status " << to_string(fit.trace.status) << "\n";
  if (!fit.trace.converged) {
    err << "warning: severity EM did not converge (" << fit.trace.message << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

struct PremiumArgs {
  std::string model;
  std::vector<std::string> history;
  std::optional<std::size_t> periods;
  std::string emit = "table";
};

std::string pad(const std::string &s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

int cmd_premium(const PremiumArgs &a, std::ostream &out, std::ostream &err) {
  const ModelFile model = load_model(a.model);
  if (!model.freq || !model.sev) {
    throw ParseError(a.model + " needs both frequency and severity parameters");
  }
  const auto counts = read_counts_csv(a.history.at(0));
  std::optional<std::vector<ClaimRow>> claims;
  if (a.history.size() > 1) claims = read_claims_csv(a.history[1]);
  auto records = build_history(counts, claims);
  if (a.periods && *a.periods < records.size()) records.resize(*a.periods);

  if (claims) {
    for (std::size_t k = 0; k < records.size(); ++k) {
      if (records[k].severities->size() != records[k].count) {
        throw ParseError("period " + std::to_string(counts[k].period) + " has count " +
                         std::to_string(records[k].count) + " but " +
                         std::to_string(records[k].severities->size()) + " claim amounts");
      }
    }
  } else {
    err << "warning: no claims file; severity premium stays at its prior value\n";
  }

  const auto quotes = premium_evolution(*model.freq, *model.sev, records);
  struct Row {
    std::size_t period;
    std::uint64_t sum_n;
    double sum_y;
    const PremiumQuote *q;
  };
  std::vector<Row> rows;
  std::uint64_t sum_n = 0;
  double sum_y = 0.0;
  for (std::size_t k = 0; k < quotes.size(); ++k) {
    if (k > 0) {
      sum_n += records[k - 1].count;
      if (records[k - 1].severities) {
        for (double y : *records[k - 1].severities) sum_y += y;
      }
    }
    rows.push_back({k, sum_n, sum_y, &quotes[k]});
  }

  if (a.emit == "json") {
    json arr = json::array();
    for (const auto &r : rows) {
      arr.push_back({{"period", r.period},
                     {"sum_n", r.sum_n},
                     {"sum_y", r.sum_y},
                     {"freq_premium", r.q->freq_component},
                     {"sev_premium", r.q->sev_component},
                     {"premium", r.q->premium},
                     {"w", r.q->w},
                     {"omega", r.q->omega}});
    }
    out << arr.dump(2) << "\n";
  } else if (a.emit == "csv") {
    out << "period,sum_n,sum_y,freq_premium,sev_premium,premium,w,omega\n";
    for (const auto &r : rows) {
      out << r.period << "," << r.sum_n << "," << format_double(r.sum_y) << ","
          << format_double(r.q->freq_component) << "," << format_double(r.q->sev_component)
          << "," << format_double(r.q->premium) << "," << format_double(r.q->w) << ","
          << format_double(r.q->omega) << "\n";
    }
  } else {
    auto fixed = [](double x, int digits) {
      std::ostringstream s;
      s.setf(std::ios::fixed);
      s.precision(digits);
      s << x;
      return s.str();
    };
    out << pad("period", 8) << pad("sum_n", 8) << pad("sum_y", 12) << pad("freq", 10)
        << pad("sev", 10) << pad("premium", 10) << pad("w", 8) << "omega\n";
    for (const auto &r : rows) {
      out << pad(std::to_string(r.period), 8) << pad(std::to_string(r.sum_n), 8)
          << pad(fixed(r.sum_y, 4), 12) << pad(fixed(r.q->freq_component, 4), 10)
          << pad(fixed(r.q->sev_component, 4), 10) << pad(fixed(r.q->premium, 4), 10)
          << pad(fixed(r.q->w, 4), 8) << fixed(r.q->omega, 4) << "\n";
    }
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string model;
  std::string spec;
  std::string output;
};

std::string scenario_csv(const std::vector<PeriodRecord> &records) {
  std::string s = "period,count,claim_id,amount\n";
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto &r = records[k];
    const std::string head = std::to_string(k + 1) + "," + std::to_string(r.count) + ",";
    if (!r.severities || r.severities->empty()) {
      s += head + ",\n";
      continue;
    }
    for (std::size_t j = 0; j < r.severities->size(); ++j) {
      s += head + std::to_string(j + 1) + "," + format_double((*r.severities)[j]) + "\n";
    }
  }
  return s;
}

int cmd_simulate(const SimulateArgs &a, std::ostream &out, std::ostream &) {
  const ModelFile model = load_model(a.model);
  if (!model.freq || !model.sev) {
    throw ParseError(a.model + " needs both frequency and severity parameters");
  }
  const json spec = read_json_arg(a.spec);
  std::string csv;
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    const RngSeed seed{spec.value("seed", std::uint64_t{0})};
    if (kind == "scenario") {
      ScenarioSpec s;
      s.pattern = spec.at("pattern").get<std::vector<std::uint64_t>>();
      s.periods = spec.at("periods").get<std::size_t>();
      const std::string mode = spec.value("severity_mode", std::string("model_draw"));
      if (mode == "model_draw") {
        s.severity_mode = SeverityMode::model_draw;
      } else if (mode == "prior_mean_plus_noise") {
        s.severity_mode = SeverityMode::prior_mean_plus_noise;
        s.noise_sd = spec.value("noise_sd", 0.0);
      } else {
        throw ParseError("unknown severity_mode '" + mode + "'");
      }
      s.seed = seed;
      csv = scenario_csv(generate_scenario(*model.freq, *model.sev, s));
    } else if (kind == "surplus") {
      SurplusConfig cfg;
      cfg.initial_surplus = spec.at("u").get<double>();
      cfg.loading = spec.at("loading").get<double>();
      cfg.horizon = spec.at("horizon").get<double>();
      cfg.dt = spec.value("dt", cfg.horizon / 100.0);
      const auto paths = spec.value("paths", std::size_t{1});
      csv = "path,time,surplus,ruined\n";
      for (std::size_t i = 0; i < paths; ++i) {
        const auto path = simulate_surplus(*model.freq, *model.sev, cfg, RngSeed{seed.seed + i});
        for (std::size_t k = 0; k < path.times.size(); ++k) {
          csv += std::to_string(i) + "," + format_double(path.times[k]) + "," +
                 format_double(path.surplus[k]) + "," + (path.ruined ? "1" : "0") + "\n";
        }
      }
    } else {
      throw ParseError("spec kind must be 'scenario' or 'surplus', got '" + kind + "'");
    }
  } catch (const json::exception &e) {
    throw ParseError("malformed spec " + a.spec + ": " + e.what());
  } catch (const std::invalid_argument &e) {
    throw ParseError("invalid spec " + a.spec + ": " + e.what());
  }
  if (a.output.empty() || a.output == "-") {
    out << csv;
  } else {
    write_text_file(a.output, csv);
  }
  return kExitOk;
}

struct GofArgs {
  std::string model;
  std::string counts;
  int fitted = 4;
};

int cmd_gof(const GofArgs &a, std::ostream &out, std::ostream &) {
  const ModelFile model = load_model(a.model);
  if (!model.freq) throw ParseError(a.model + " has no frequency parameters");
  std::vector<std::uint64_t> counts;
  for (const auto &r : read_counts_csv(a.counts)) counts.push_back(r.count);
  const CountSample sample(std::move(counts));
  const auto rep = goodness_of_fit(*model.freq, sample, a.fitted);
  out << pad("test", 8) << pad("statistic", 14) << pad("df", 6) << "p_value\n";
  out << pad("ks", 8) << pad(format_double(rep.ks_statistic), 14) << pad("-", 6)
      << format_double(rep.ks_pvalue) << "\n";
  out << pad("chisq", 8) << pad(format_double(rep.chisq_statistic), 14)
      << pad(std::to_string(rep.chisq_df), 6) << format_double(rep.chisq_pvalue) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Two-stream claim model: fitting, premiums, simulation and diagnostics",
               args.empty() ? "twostream" : args[0]};
  app.require_subcommand(1);

  FitFreqArgs ff;
  auto *fit_freq_cmd = app.add_subcommand("fit-freq", "Fit the count mixture by EM");
  fit_freq_cmd->add_option("--counts", ff.counts, "period,count CSV")->required();
  fit_freq_cmd->add_option("--init", ff.init, "'moments', inline JSON or a JSON file");
  fit_freq_cmd->add_option("--tol", ff.tol, "parameter tolerance");
  fit_freq_cmd->add_option("--max-iters", ff.max_iters);
  fit_freq_cmd->add_option("-o,--output", ff.output, "model JSON to write")->required();

  FitSevArgs fs_args;
  double nu_init = 0.0;
  auto *fit_sev_cmd = app.add_subcommand("fit-sev", "Fit the severity mixture by EM");
  fit_sev_cmd->add_option("--claims", fs_args.claims, "period,claim_id,amount CSV")->required();
  fit_sev_cmd->add_option("--model", fs_args.model, "model JSON with frequency params")->required();
  fit_sev_cmd->add_flag("--estimate-nu", fs_args.estimate_nu, "estimate nu instead of linking it");
  auto *nu_opt = fit_sev_cmd->add_option("--nu-init", nu_init, "starting nu with --estimate-nu");
  fit_sev_cmd->add_option("--init", fs_args.init, "inline JSON or JSON file with mu, delta, sigma");
  fit_sev_cmd->add_option("--tol", fs_args.tol);
  fit_sev_cmd->add_option("--max-iters", fs_args.max_iters);
  fit_sev_cmd->add_option("-o,--output", fs_args.output)->required();

  PremiumArgs pa;
  std::size_t periods = 0;
  auto *premium_cmd = app.add_subcommand("premium", "Bayesian premium after each period");
  premium_cmd->add_option("--model", pa.model)->required();
  premium_cmd->add_option("--history", pa.history, "counts CSV, optionally followed by claims CSV")
      ->required()
      ->expected(1, 2);
  auto *periods_opt = premium_cmd->add_option("--periods", periods, "use the first k periods");
  premium_cmd->add_option("--emit", pa.emit)->check(CLI::IsMember({"table", "csv", "json"}));

  SimulateArgs sa;
  auto *simulate_cmd = app.add_subcommand("simulate", "Simulate a scenario or surplus paths");
  simulate_cmd->add_option("--model", sa.model)->required();
  simulate_cmd->add_option("--spec", sa.spec, "JSON spec (file or inline)")->required();
  simulate_cmd->add_option("-o,--output", sa.output, "CSV output ('-' for stdout)");

  GofArgs ga;
  auto *gof_cmd = app.add_subcommand("gof", "KS and chi-square tests of the count model");
  gof_cmd->add_option("--model", ga.model)->required();
  gof_cmd->add_option("--counts", ga.counts)->required();
  gof_cmd->add_option("--fitted-params", ga.fitted, "parameters estimated from these counts");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (*fit_freq_cmd) return cmd_fit_freq(ff, out, err);
    if (*fit_sev_cmd) {
      if (*nu_opt) fs_args.nu_init = nu_init;
      return cmd_fit_sev(fs_args, out, err);
    }
    if (*premium_cmd) {
      if (*periods_opt) pa.periods = periods;
      return cmd_premium(pa, out, err);
    }
    if (*simulate_cmd) return cmd_simulate(sa, out, err);
    if (*gof_cmd) return cmd_gof(ga, out, err);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace twostream::cli
