#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fpp/cli/commands.hpp"
#include "fpp/errors.hpp"
#include "fpp/numeric.hpp"

namespace fpp::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Delta_k = m_{k+1} - m_k for k = -1 .. k_max - 1.
double delta_at(const MartingaleTrace& t, int k) {
  const auto i = static_cast<std::size_t>(k + 1);
  return i < t.differences.size() ? t.differences[i] : 0.0;
}

}  // namespace

MartingaleSummary run_martingale(const ExperimentConfig& cfg, long n) {
  cfg.validate();
  if (cfg.replicas < 2) throw ConfigError("martingale needs replicas >= 2 base configurations");
  MartingaleParams p;
  p.tau = cfg.tau(n);
  p.geometry = cfg.geometry(n);
  p.replicas = cfg.inner_replicas;
  p.threads = cfg.threads;
  const Region window = p.geometry.window(cfg.max_vertices);
  const BoxPair boxes = p.geometry.boxes(window);
  const DistributionSpec dist = cfg.distribution();

  MartingaleSummary s;
  s.n = n;
  s.N = static_cast<std::size_t>(cfg.replicas);
  s.R = cfg.inner_replicas;
  int top = 0;
  for (std::size_t i = 0; i < s.N; ++i) {
    const WeightField f = sample_configuration(window, dist, replica_seed(cfg.seed, n, i));
    int k_max = cfg.k_max;
    if (k_max < 0) {
      const TauField tf = tau_transform(f, p.tau);
      const BallSequence seq = ball_growth(tf, boxes.source, boxes.target, 1 << 20);
      if (!seq.k_star()) throw PreconditionError("target not reached inside the window; enlarge --transverse");
      k_max = *seq.k_star() + 2;
    }
    s.traces.push_back(martingale_trace(f, k_max, p));
    top = std::max(top, k_max);
  }

  for (int k = -1; k < top; ++k) {
    std::vector<double> d;
    for (const auto& t : s.traces) d.push_back(delta_at(t, k));
    DifferenceStats st;
    st.k = k;
    st.N = d.size();
    st.mean = pairwise_sum(d) / static_cast<double>(d.size());
    CompensatedSum ss;
    for (double x : d) {
      ss.add((x - st.mean) * (x - st.mean));
      st.max_abs = std::max(st.max_abs, std::abs(x));
    }
    st.std_error = std::sqrt(ss.value() / static_cast<double>(d.size() - 1) / static_cast<double>(d.size()));
    s.per_k.push_back(st);
  }
  for (const auto& t : s.traces) {
    s.max_abs_difference = std::max(s.max_abs_difference, t.max_abs_difference);
    s.max_telescoping_residual = std::max(s.max_telescoping_residual, t.telescoping_residual);
    s.all_nested = s.all_nested && t.nested;
    if (t.terminal_residual) s.max_terminal_residual = std::max(s.max_terminal_residual, *t.terminal_residual);
    if (!t.k_star) continue;
    for (int k = *t.k_star; k + 1 < static_cast<int>(t.differences.size()); ++k) {
      s.max_collapse_residual = std::max(s.max_collapse_residual, std::abs(delta_at(t, k)));
      ++s.collapse_checks;
    }
  }
  return s;
}

nlohmann::json martingale_json(const ExperimentConfig& cfg, const MartingaleSummary& s) {
  nlohmann::json j;
  j["config"] = cfg.to_json();
  j["n"] = s.n;
  j["N"] = s.N;
  j["R"] = s.R;
  nlohmann::json per_k = nlohmann::json::array();
  for (const auto& d : s.per_k) {
    per_k.push_back({{"k", d.k},
                     {"N", d.N},
                     {"mean", d.mean},
                     {"std_error", d.std_error},
                     {"max_abs", d.max_abs},
                     {"within_3se", std::abs(d.mean) <= 3.0 * d.std_error}});
  }
  j["per_k"] = per_k;
  std::vector<int> kstar;
  std::vector<double> shape;
  for (const auto& t : s.traces) {
    kstar.push_back(t.k_star.value_or(-1));
    shape.push_back(t.shape_constant);
  }
  j["k_star"] = kstar;
  j["shape_constant"] = shape;
  j["max_abs_difference"] = s.max_abs_difference;
  j["max_telescoping_residual"] = s.max_telescoping_residual;
  j["collapse"] = {{"checks", s.collapse_checks},
                   {"max_abs", s.max_collapse_residual},
                   {"max_terminal_residual", s.max_terminal_residual}};
  j["nested"] = s.all_nested;
  if (s.max_abs_difference > 0.0) {
    std::vector<double> x;
    for (int i = 0; i <= 40; ++i) x.push_back(0.25 * i);
    const int steps = static_cast<int>(s.per_k.size());
    j["azuma"] = {{"c", s.max_abs_difference}, {"K", steps}, {"x", x}, {"bound", azuma_curve(s.max_abs_difference, steps, x)}};
  } else {
    j["azuma"] = nullptr;
  }
  return j;
}

std::string martingale_csv(const MartingaleSummary& s) {
  std::ostringstream os;
  os << "n,replica,seed,k,mean,std_error,frozen_vertices,increment\n";
  for (std::size_t i = 0; i < s.traces.size(); ++i) {
    const auto& t = s.traces[i];
    for (std::size_t j = 0; j < t.ks.size(); ++j) {
      os << s.n << ',' << i << ',' << t.seed << ',' << t.ks[j] << ',' << num(t.estimates[j].mean) << ','
         << num(t.estimates[j].std_error) << ',' << t.estimates[j].frozen_vertices << ',';
      if (j > 0) os << num(t.differences[j - 1]);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace fpp::cli
