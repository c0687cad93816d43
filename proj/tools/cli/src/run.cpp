#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fpp/cli/commands.hpp"
#include "fpp/errors.hpp"

namespace fpp::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json interval_json(const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); }

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + p.string() + "'");
}

std::size_t distinct_n(const std::vector<ReplicaStats>& stats) {
  std::set<long> ns;
  for (const auto& s : stats) ns.insert(s.n);
  return ns.size();
}

nlohmann::json time_constant_json(const TimeConstantReport& r) {
  return nlohmann::json{{"mu_upper", r.mu_upper},
                        {"allowance", r.allowance},
                        {"mu_hat", r.mu_hat},
                        {"n", r.n},
                        {"mean", r.mean},
                        {"std_error", r.std_error},
                        {"gap", r.gap},
                        {"lower_bound_exact", r.lower_bound_exact},
                        {"gap_nonnegative", r.gap_nonnegative},
                        {"trend_ok", r.trend_ok},
                        {"trend", {{"slope", r.trend.slope}, {"slope_ci", interval_json(r.trend.slope_ci)}}},
                        {"shape",
                         {{"model", "gap ~ c sqrt(n) (ln n)^4"},
                          {"c", r.shape.coefficient},
                          {"ci", interval_json(r.shape.ci)},
                          {"r2", r.shape.r2}}},
                        {"warnings", r.warnings}};
}

double azuma_scale(long n, double delta) { return std::pow(std::log(static_cast<double>(n)), 2.0 + 2.0 * delta); }

}  // namespace

std::vector<double> default_tail_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 30; ++i) g.push_back(0.05 * i);
  return g;
}

std::string ensemble_csv(const std::vector<ReplicaStats>& stats) {
  std::ostringstream os;
  os << "quantity,n,replica,seed,value,path_len,max_edge\n";
  for (const auto& s : stats) {
    for (const auto& r : s.replicas) {
      os << to_string(s.quantity) << ',' << s.n << ',' << r.index << ',' << r.seed << ',' << num(r.value) << ','
         << r.path_len << ',' << num(r.max_edge) << '\n';
    }
  }
  return os.str();
}

nlohmann::json fit_json(const FitReport& fit) {
  nlohmann::json params = nlohmann::json::object(), ci = nlohmann::json::object();
  for (const auto& [k, v] : fit.params) params[k] = v;
  for (const auto& [k, v] : fit.ci) ci[k] = interval_json(v);
  return nlohmann::json{{"model", fit.model},   {"params", params},         {"ci", ci},
                        {"r2", fit.r2},         {"degenerate", fit.degenerate}, {"consistent", fit.consistent},
                        {"notes", fit.notes}};
}

nlohmann::json summary_json(const ExperimentConfig& cfg, const std::vector<ReplicaStats>& stats) {
  nlohmann::json j;
  j["config"] = cfg.to_json();
  const auto grid = default_tail_grid();
  nlohmann::json ensembles = nlohmann::json::array();
  for (const auto& s : stats) {
    nlohmann::json e{{"quantity", to_string(s.quantity)},
                     {"n", s.n},
                     {"N", s.N},
                     {"mean", s.mean},
                     {"var", s.var},
                     {"std_error", s.std_error()},
                     {"moments", s.central_moments}};
    nlohmann::json tails = nlohmann::json::array();
    const auto tail = tail_profile(s, grid);
    for (const auto& t : tail) tails.push_back({{"x", t.x}, {"p", t.p}, {"lo", t.lo}, {"hi", t.hi}, {"count", t.count}});
    e["tails"] = tails;
    const TailShape shape = tail_shape(tail, s.N);
    e["fit"] = {{"model", "log p = a + b x^2"},
                {"params",
                 {{"slope", shape.slope},
                  {"points", shape.points},
                  {"decreasing", shape.decreasing},
                  {"max_second_difference", shape.max_second_difference}}},
                {"ci", {{"slope", interval_json(shape.slope_ci)}}}};
    if (s.tau_mismatch) {
      const auto& m = *s.tau_mismatch;
      e["tau_mismatch"] = {{"events", m.events}, {"N", m.N}, {"rate", m.rate}, {"ci", interval_json(m.ci)}};
    }
    ensembles.push_back(e);
  }
  j["ensembles"] = ensembles;

  j["variance_scaling"] = nullptr;
  j["moment_growth"] = nlohmann::json::array();
  j["time_constant"] = nullptr;
  if (distinct_n(stats) >= 3) {
    j["variance_scaling"] = fit_json(variance_scaling(stats));
    const int orders = static_cast<int>(stats.front().central_moments.size() / 2);
    for (int m = 1; m <= orders; ++m) j["moment_growth"].push_back(fit_json(moment_growth(stats, m)));
  }
  if (distinct_n(stats) >= 4) j["time_constant"] = time_constant_json(time_constant(stats));
  return j;
}

std::string plot_script(const ExperimentConfig& cfg, const std::vector<ReplicaStats>& stats) {
  std::ostringstream os;
  os << "# gnuplot script for ensemble " << cfg.quantity << " (" << cfg.dist << ")\n";
  os << "set terminal pngcairo size 900,600\n";
  os << "set key top left\n\n";

  os << "$variance << EOD\n";
  for (const auto& s : stats) os << s.n << ' ' << num(s.var) << ' ' << num(s.mean) << '\n';
  os << "EOD\n\n";
  os << "set output 'variance_vs_n.png'\n";
  os << "set logscale xy\n";
  os << "set xlabel 'n'\nset ylabel 'Var'\n";
  std::string fit_line;
  if (distinct_n(stats) >= 3) {
    const FitReport f = variance_scaling(stats);
    if (!f.degenerate) {
      fit_line = ", " + num(f.params.at("c")) + " * x**" + num(f.params.at("gamma")) + " title 'fit n^gamma' lw 2";
    }
  }
  os << "plot $variance using 1:2 with linespoints title 'sample variance'" << fit_line << "\n";
  os << "unset logscale\n\n";

  const auto grid = default_tail_grid();
  os << "set output 'tails.png'\n";
  os << "set logscale y\n";
  os << "set xlabel 'x'\nset ylabel 'P[|X - mean| >= x sqrt(n)]'\n";
  std::ostringstream plots;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    os << "$tail" << i << " << EOD\n";
    for (const auto& t : tail_profile(s, grid)) {
      if (t.count > 0) os << num(t.x) << ' ' << num(t.p) << ' ' << num(t.lo) << ' ' << num(t.hi) << '\n';
    }
    os << "EOD\n";
    // Azuma overlay with increments bounded by (ln n)^(2 + 2 delta) over ceil(mean) steps.
    const int steps = std::max(1, static_cast<int>(std::ceil(s.mean)));
    std::vector<double> dev;
    for (double x : grid) dev.push_back(x * std::sqrt(static_cast<double>(s.n)));
    const auto bound = azuma_curve(azuma_scale(s.n, cfg.delta), steps, dev);
    os << "$azuma" << i << " << EOD\n";
    for (std::size_t g = 0; g < grid.size(); ++g) os << num(grid[g]) << ' ' << num(bound[g]) << '\n';
    os << "EOD\n";
    plots << (i ? ", \\\n     " : "plot ") << "$tail" << i << " using 1:2:3:4 with yerrorlines title 'n = " << s.n
          << "', $azuma" << i << " using 1:2 with lines dt 2 title 'Azuma n = " << s.n << "'";
  }
  os << plots.str() << "\n";
  os << "unset logscale\n\n";

  if (distinct_n(stats) >= 4) {
    const TimeConstantReport tc = time_constant(stats);
    os << "$gap << EOD\n";
    for (std::size_t i = 0; i < tc.n.size(); ++i) {
      os << tc.n[i] << ' ' << num(tc.gap[i]) << ' ' << num(tc.std_error[i]) << '\n';
    }
    os << "EOD\n";
    os << "set output 'gap_vs_n.png'\n";
    os << "set xlabel 'n'\nset ylabel 'mean(n) - n mu_hat'\n";
    os << "plot $gap using 1:2:3 with yerrorlines title 'gap', " << num(tc.shape.coefficient)
       << " * sqrt(x) * log(x)**4 title 'c sqrt(n) (ln n)^4'\n";
  } else {
    os << "# gap_vs_n needs at least four n values\n";
  }
  return os.str();
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunOutput out;
  out.stats = run_ensemble(cfg.parsed_quantity(), cfg.n_list, static_cast<std::size_t>(cfg.replicas),
                           cfg.distribution(), cfg.ensemble(), cfg.seed);
  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  out.csv = dir / "ensemble.csv";
  out.summary = dir / "summary.json";
  out.plot = dir / "plots.gp";
  write_file(out.csv, ensemble_csv(out.stats));
  write_file(out.summary, summary_json(cfg, out.stats).dump(2) + "\n");
  write_file(out.plot, plot_script(cfg, out.stats));
  return out;
}

}  // namespace fpp::cli
