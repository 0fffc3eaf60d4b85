// covertime: command-line front end.
//
//   covertime analytic <scenario> [params] --r <rate>
//   covertime sweep --config <file> [--out <csv>] [--seed N] [--plot <dir>]
//   covertime network report --file <net.json> --r <rate>
//   covertime network lattice [--g 2] [--side 6] [--k 1] [--radius j] --out <net.json>
//   covertime plot --csv <file> --dir <dir>
//
// Exit codes: 0 success, 1 invalid input, 2 numeric refusal.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "covertime/continuum.hpp"
#include "covertime/error.hpp"
#include "covertime/network.hpp"
#include "covertime/network_io.hpp"
#include "covertime/optimize.hpp"
#include "covertime/sweep.hpp"

using namespace covertime;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const std::string& key, double v) { std::cout << key << " = " << fmt(v) << "\n"; }

struct AnalyticArgs {
  std::string scenario;
  double a = 1, b = -1, D = 1, R = 0, v = 1, gamma = 1, r = 1;
  double ell = 0, L = 0, alpha = 0.5;
  int dimension = 1;
  std::string formula = "published";
};

void run_analytic(const AnalyticArgs& x) {
  const double b = x.b > 0 ? x.b : x.a;
  const std::string& s = x.scenario;
  if (s == "bm1d_unconstrained" || s == "bm1d_constrained") {
    const IntervalTarget target{x.a, b, s == "bm1d_constrained", x.R};
    const BrownianSpec bm{x.D};
    const auto clock = ResetClock::exponential(x.r);
    const double mct = std::exp(log_mean_cover_time(bm, target, clock));
    const auto c = bm_components(target.effective_a(), target.effective_b(), x.D, x.r);
    const auto setting = AsymptoticSetting::bm1d(target.effective_a(), target.effective_b(), x.D);
    const double log_p = log_success_prob_asymptotic(setting, x.r);
    print("mct", mct);
    print("alpha", c.alpha);
    print("interval_exit_mean", c.interval_exit_mean);
    print("xi_a", c.xi_a);
    print("xi_b", c.xi_b);
    print("constrained_leg_a", c.constrained_leg_a);
    print("constrained_leg_b", c.constrained_leg_b);
    print("ln_p", log_p);
    print("asymptotic_mct",
          mct_frequent_reset_approx(1, x.r, log_p, far_points_prefactor(setting.far_points(), 1)));
    print("r_opt_estimate", optimal_rate_estimate(setting));
    return;
  }
  if (s == "rtp1d_unconstrained" || s == "rtp1d_constrained") {
    if (x.b > 0 && x.b != x.a) throw ValidationError("RTP scenarios use a symmetric interval; omit --b");
    const IntervalTarget target{x.a, x.a, s == "rtp1d_constrained", x.R};
    const RtpSpec rtp{x.v, x.gamma};
    RtpFormula formula;
    if (x.formula == "published")
      formula = RtpFormula::Published;
    else if (x.formula == "exact")
      formula = RtpFormula::Exact;
    else
      throw ValidationError("--formula must be 'published' or 'exact'");
    const auto clock = ResetClock::exponential(x.r);
    const double ea = target.effective_a();
    const auto c = rtp_components(ea, x.v, x.gamma, x.r);
    const auto setting = AsymptoticSetting::rtp1d(ea, x.v, x.gamma);
    const double log_p = log_success_prob_asymptotic(setting, x.r);
    print("mct", std::exp(log_mean_cover_time(rtp, target, clock, formula)));
    if (!target.constrained)
      print(formula == RtpFormula::Published ? "mct_exact_formula" : "mct_published_formula",
            std::exp(log_mean_cover_time(rtp, target, clock,
                                         formula == RtpFormula::Published ? RtpFormula::Exact
                                                                          : RtpFormula::Published)));
    print("c_r", c.c_r);
    print("interval_exit_mean", c.interval_exit_mean);
    print("halfline_exit_mean", c.halfline_exit_mean);
    print("escape_leg", c.escape_leg);
    print("constrained_leg", c.constrained_leg);
    print("ln_p", log_p);
    print("asymptotic_mct", mct_frequent_reset_approx(1, x.r, log_p, 1.5));
    print("r_opt_estimate", optimal_rate_estimate(setting));
    return;
  }
  AsymptoticSetting setting;
  if (s == "ball")
    setting = AsymptoticSetting::ball(x.a, x.R, x.D, x.dimension);
  else if (s == "torus")
    setting = AsymptoticSetting::torus(x.ell, x.R, x.D, x.dimension);
  else if (s == "subdiffusion")
    setting = AsymptoticSetting::subdiffusion(x.L, x.D, x.alpha);
  else
    throw ValidationError("unknown scenario '" + s + "'");
  const double log_p = log_success_prob_asymptotic(setting, x.r);
  print("ln_p", log_p);
  print("asymptotic_mct", mct_frequent_reset_approx(1, x.r, log_p, 1.0));
  print("r_opt_estimate", optimal_rate_estimate(setting));
  if (s == "subdiffusion") {
    const auto e = subdiffusion_exponent(x.L, x.D, x.alpha);
    print("beta", e.beta);
    print("C", e.C);
    print("gamma", e.gamma);
  }
}

std::string join(const NetworkSpec& spec, const StateSet& set) {
  std::string out;
  for (int s : set) out += (out.empty() ? "" : " ") + spec.label(s);
  return out;
}

void run_network_report(const std::string& file, double r, int max_m) {
  const NetworkSpec spec = read_network_file(file);
  const GeodesicAnalysis g = validate_network(spec);
  std::cout << "states = " << spec.n_states() << "\n"
            << "start = " << spec.label(spec.start) << "\n"
            << "targets = " << join(spec, spec.targets) << "\n";
  for (int t : spec.targets) std::cout << "h(" << spec.label(t) << ") = " << g.h[t] << "\n";
  std::cout << "h_star = " << g.h_star << "\n"
            << "far_set = " << join(spec, g.far_set) << "\n";
  const auto lam = lambda_of_set(spec, g, g.far_set);
  print("lambda_far", lam.lambda);
  print("resetting_rate", r);

  int status = 0;
  auto attempt = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const NumericRefusal& e) {
      std::cout << what << " = refused (" << e.what() << ")\n";
      status = 2;
    }
  };
  attempt("exact_moments", [&] {
    const auto m = mct_exact_moments(spec, r, max_m);
    for (int k = 0; k < max_m; ++k) print("exact_moment_" + std::to_string(k + 1), m[k]);
  });
  if (r > 0) {
    attempt("asymptotic_moments", [&] {
      for (int k = 1; k <= max_m; ++k)
        print("asymptotic_moment_" + std::to_string(k), theorem2_moment(spec, g, k, r));
    });
    if (g.far_set.size() == 1) print("p_star", lam.lambda / std::pow(r, g.h_star));
  } else {
    std::cout << "asymptotic_moments = n/a (frequent-resetting asymptote needs r > 0)\n";
  }
  std::optional<bool> beneficial;
  attempt("criterion", [&] {
    const auto c = reset_benefit_criterion(spec);
    print("criterion_value", c.value);
    beneficial = c.beneficial;
    std::cout << "resetting_beneficial = " << (c.beneficial ? "yes" : "no") << "\n";
  });
  if (beneficial == false) {
    std::cout << "r_opt_estimate = none (resetting does not help at small r)\n";
  } else if (beneficial) {
    attempt("r_opt_estimate", [&] {
      print("r_opt_estimate", network_ropt_estimate(spec, SecondOrderForm::Corrected));
    });
    attempt("r_opt_estimate_published_form", [&] {
      print("r_opt_estimate_published_form",
            network_ropt_estimate(spec, SecondOrderForm::Published));
    });
  }
  if (status) throw NumericRefusal("some quantities were refused (see above)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cover times of searchers under stochastic resetting"};
  app.require_subcommand(1);

  // analytic
  AnalyticArgs ax;
  auto* analytic = app.add_subcommand("analytic", "closed forms and asymptotics at one rate");
  analytic
      ->add_option("scenario", ax.scenario,
                   "bm1d_unconstrained | bm1d_constrained | rtp1d_unconstrained | "
                   "rtp1d_constrained | ball | torus | subdiffusion")
      ->required();
  analytic->add_option("--r", ax.r, "resetting rate")->required();
  analytic->add_option("--a", ax.a, "left half-width / ball radius");
  analytic->add_option("--b", ax.b, "right half-width (defaults to a)");
  analytic->add_option("--D", ax.D, "diffusivity");
  analytic->add_option("--R", ax.R, "detection radius");
  analytic->add_option("--v", ax.v, "RTP speed");
  analytic->add_option("--gamma", ax.gamma, "RTP switching rate");
  analytic->add_option("--formula", ax.formula, "RTP unconstrained: published | exact");
  analytic->add_option("--ell", ax.ell, "torus side length");
  analytic->add_option("--L", ax.L, "subdiffusion target distance");
  analytic->add_option("--alpha", ax.alpha, "subdiffusion exponent in (0, 1)");
  analytic->add_option("--d", ax.dimension, "spatial dimension");

  // sweep
  std::string config_path, out_path, plot_dir;
  std::optional<std::uint64_t> seed;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep over r");
  sweep->add_option("--config", config_path, "sweep config file")->required();
  sweep->add_option("--out", out_path, "CSV output (default: stdout)");
  sweep->add_option("--seed", seed, "override the Monte Carlo seed");
  sweep->add_option("--plot", plot_dir, "also write plot data and a gnuplot script here");

  // network
  auto* network = app.add_subcommand("network", "finite-network analytics");
  network->require_subcommand(1);
  std::string net_file;
  double net_r = 1;
  int net_m = 2;
  auto* report = network->add_subcommand("report", "geodesics, moments, criterion, r_opt");
  report->add_option("--file", net_file, "network JSON file")->required();
  report->add_option("--r", net_r, "resetting rate")->required();
  report->add_option("--m", net_m, "highest moment order (1-4)")->check(CLI::Range(1, 4));
  int lat_g = 2, lat_side = 6, lat_radius = 0;
  double lat_k = 1;
  std::string lat_out;
  auto* lattice = network->add_subcommand("lattice", "write a periodic lattice network file");
  lattice->add_option("--g", lat_g, "dimension");
  lattice->add_option("--side", lat_side, "sites per side (even)");
  lattice->add_option("--k", lat_k, "hop rate");
  lattice->add_option("--radius", lat_radius, "targets: states within this many hops of the antipode");
  lattice->add_option("--out", lat_out, "output file")->required();

  // plot
  std::string plot_csv, plot_out;
  auto* plot = app.add_subcommand("plot", "turn a sweep CSV into plot data");
  plot->add_option("--csv", plot_csv, "sweep CSV")->required();
  plot->add_option("--dir", plot_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analytic) {
      run_analytic(ax);
    } else if (*sweep) {
      SweepConfig cfg = parse_config(config_path);
      if (seed) {
        if (!cfg.mc) throw ValidationError("--seed given but the config has no [mc] section");
        cfg.mc->sim.seed = *seed;
        std::erase(cfg.defaults_applied, std::string("seed=0"));
      }
      std::cerr << cfg.echo() << "\n";
      const std::string csv = run_sweep(cfg, std::cerr);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + out_path);
        out << csv;
      }
      if (!plot_dir.empty())
        for (const auto& f : emit_plot_data(csv, plot_dir)) std::cerr << "wrote " << f << "\n";
    } else if (*report) {
      run_network_report(net_file, net_r, net_m);
    } else if (*lattice) {
      NetworkSpec spec = periodic_lattice(lat_g, lat_side, lat_k);
      if (lat_radius < 0) throw ValidationError("--radius must be non-negative");
      spec.targets = states_within(spec, spec.targets, lat_radius);
      validate_network(spec);
      std::ofstream out(lat_out, std::ios::binary);
      if (!out) throw ValidationError("cannot write " + lat_out);
      out << network_to_json(spec);
    } else if (*plot) {
      std::ifstream in(plot_csv);
      if (!in) throw ValidationError("cannot open " + plot_csv);
      std::stringstream buf;
      buf << in.rdbuf();
      for (const auto& f : emit_plot_data(buf.str(), plot_out)) std::cerr << "wrote " << f << "\n";
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericRefusal& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
