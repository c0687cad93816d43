#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <utility>

#include <CLI11.hpp>

#include "fpp/cli/commands.hpp"
#include "fpp/cli/suites.hpp"
#include "fpp/errors.hpp"

namespace fpp::cli {

namespace {

struct Flags {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::string config_path;
  CLI::Option* config = nullptr;
};

const std::map<std::string, std::string>& flag_help() {
  static const std::map<std::string, std::string> help{
      {"dim", "lattice dimension d"},
      {"n", "comma separated list of n"},
      {"quantity", "a0n, b0n, s0n, phi, T_box or T_tau_box"},
      {"dist", "weight law, e.g. exponential:rate=1"},
      {"epsilon", "small-weight threshold"},
      {"M", "large-weight threshold"},
      {"delta", "exponent in (ln n)^(1+delta)"},
      {"transverse", "transverse half-width of the window"},
      {"pad_factor", "longitudinal padding as a multiple of n"},
      {"box_half_width", "half-width of the end boxes"},
      {"replicas", "number of configurations N"},
      {"inner_replicas", "resamples R per conditional mean"},
      {"k_max", "last martingale level (negative: k* + 2)"},
      {"seed", "master seed"},
      {"threads", "worker threads (default FPP_THREADS or all cores)"},
      {"out", "output directory"},
      {"max_vertices", "largest window allowed"},
  };
  return help;
}

void add_config_flags(CLI::App* sub, Flags& f) {
  for (const auto& key : config_keys()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    auto* opt = sub->add_option("--" + flag, f.values[key], flag_help().at(key));
    f.options.emplace_back(key, opt);
  }
  f.config = sub->add_option("--config", f.config_path, "flat key = value file; flags override it");
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig cfg;
  cfg.threads = default_threads();
  if (f.config != nullptr && f.config->count() > 0) apply_config_file(cfg, f.config_path);
  for (const auto& [key, opt] : f.options) {
    if (opt->count() > 0) apply_setting(cfg, key, f.values.at(key));
  }
  cfg.validate();
  return cfg;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

int do_run(const ExperimentConfig& cfg, std::ostream& out) {
  const RunOutput r = run_experiment(cfg);
  for (const auto& s : r.stats) {
    out << to_string(s.quantity) << " n=" << s.n << " N=" << s.N << " mean=" << s.mean << " var=" << s.var;
    if (s.tau_mismatch) out << " tau_mismatch=" << s.tau_mismatch->rate;
    out << "\n";
  }
  out << "wrote " << r.csv.string() << ", " << r.summary.string() << ", " << r.plot.string() << "\n";
  return 0;
}

int do_verify(const std::string& suite, const ExperimentConfig& cfg, std::ostream& out) {
  const SuiteReport rep = verify_suite(suite, cfg);
  out << rep.text();
  return rep.exit_code();
}

int do_martingale(const ExperimentConfig& cfg, std::ostream& out) {
  const long n = cfg.n_list.front();
  const MartingaleSummary s = run_martingale(cfg, n);
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  write_text(dir / "martingale.csv", martingale_csv(s));
  write_text(dir / "martingale.json", martingale_json(cfg, s).dump(2) + "\n");
  out << "martingale n=" << n << " N=" << s.N << " R=" << s.R << "\n";
  for (const auto& d : s.per_k) {
    out << "  k=" << d.k << " mean(delta)=" << d.mean << " se=" << d.std_error << " max|delta|=" << d.max_abs << "\n";
  }
  out << "max |delta| = " << s.max_abs_difference << ", telescoping residual = " << s.max_telescoping_residual
      << ", collapse residual = " << s.max_collapse_residual << " over " << s.collapse_checks << " checks\n";
  out << "wrote " << (dir / "martingale.csv").string() << ", " << (dir / "martingale.json").string() << "\n";
  return 0;
}

int do_report(const std::string& dir, std::ostream& out) {
  const std::string md = build_report(dir);
  write_text(std::filesystem::path(dir) / "report.md", md);
  out << md;
  return 0;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"First-passage percolation experiments on Z^d", "fpp"};
  app.require_subcommand(1);

  Flags run_flags, verify_flags, mart_flags;
  auto* run = app.add_subcommand("run", "sample an ensemble and write ensemble.csv, summary.json, plots.gp");
  add_config_flags(run, run_flags);

  auto* verify = app.add_subcommand("verify", "run an exact verification suite over sampled configurations");
  std::string suite;
  std::string suites_help = "one of:";
  for (const auto& s : suite_names()) suites_help += " " + s;
  verify->add_option("suite", suite, suites_help)->required();
  add_config_flags(verify, verify_flags);

  auto* mart = app.add_subcommand("martingale", "estimate the ball-filtration martingale differences");
  add_config_flags(mart, mart_flags);

  auto* report = app.add_subcommand("report", "collect summary.json files into a markdown report");
  std::string report_dir;
  report->add_option("dir", report_dir, "directory holding summary.json / martingale.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n" << "run 'fpp --help' for usage\n";
    return 2;
  }

  try {
    if (*run) return do_run(build_config(run_flags), out);
    if (*verify) return do_verify(suite, build_config(verify_flags), out);
    if (*mart) return do_martingale(build_config(mart_flags), out);
    if (*report) return do_report(report_dir, out);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return 2;
  } catch (const WindowTooSmallError& e) {
    err << "window too small: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fpp::cli
