#include "covertime/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "covertime/error.hpp"
#include "covertime/network_io.hpp"

namespace covertime {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

int edit_distance(const std::string& x, const std::string& y) {
  std::vector<int> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= y.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] != y[j - 1])});
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

// Common spellings of the physical parameters.
const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {"diffusion", "D"},         {"diffusivity", "D"},    {"diffusion_coefficient", "D"},
      {"speed", "v"},             {"velocity", "v"},       {"switch_rate", "gamma"},
      {"switching_rate", "gamma"}, {"tumble_rate", "gamma"}, {"radius", "R"},
      {"detection_radius", "R"},  {"replicates", "n"},     {"n_replicates", "n"},
      {"samples", "n"},           {"n_samples", "n"},      {"timestep", "dt"},
      {"time_step", "dt"},        {"rates", "r_grid"},     {"grid", "r_grid"},
      {"file", "network"},        {"net", "network"},      {"sampler", "network_sampler"},
      {"left", "a"},              {"right", "b"},          {"shape", "clock_shape"},
  };
  return table;
}

std::string suggestion(const std::string& key, const std::vector<std::string>& allowed) {
  auto it = aliases().find(lower(key));
  if (it != aliases().end() &&
      std::find(allowed.begin(), allowed.end(), it->second) != allowed.end())
    return it->second;
  std::string best;
  int best_d = 3;
  for (const auto& a : allowed) {
    const int d = edit_distance(lower(key), lower(a));
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
};

class ConfigError {
 public:
  explicit ConfigError(std::string path) : path_(std::move(path)) {}
  [[noreturn]] void fail(int line, const std::string& message) const {
    std::ostringstream os;
    os << path_;
    if (line > 0) os << ":" << line;
    os << ": " << message;
    throw ValidationError(os.str());
  }

 private:
  std::string path_;
};

double parse_double(const ConfigError& err, const std::string& key, const Entry& e) {
  double v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    err.fail(e.line, "'" + key + "' expects a number, got '" + e.value + "'");
  return v;
}

std::uint64_t parse_uint(const ConfigError& err, const std::string& key, const Entry& e) {
  std::uint64_t v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc() && ptr == last) return v;
  // allow 1e4-style integers
  const double d = parse_double(err, key, e);
  if (d < 0 || d != std::floor(d) || d > 1.8e19)
    err.fail(e.line, "'" + key + "' expects a non-negative integer, got '" + e.value + "'");
  return static_cast<std::uint64_t>(d);
}

double positive(const ConfigError& err, const std::string& key, const Entry& e) {
  const double v = parse_double(err, key, e);
  if (!(v > 0.0)) err.fail(e.line, "'" + key + "' must be positive, got " + e.value);
  return v;
}

void check_keys(const ConfigError& err, const Section& s, const std::vector<std::string>& allowed) {
  for (const auto& [key, e] : s.entries) {
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
    std::string msg = "unknown key '" + key + "' in [" + s.name + "]";
    const auto hint = suggestion(key, allowed);
    if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
    err.fail(e.line, msg);
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t series, std::size_t point) {
  RandomStream mix = make_stream(seed, (static_cast<std::uint64_t>(series) << 32) | point);
  return mix();
}

bool valid_series_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Bm1dUnconstrained:
      return "bm1d_unconstrained";
    case Scenario::Bm1dConstrained:
      return "bm1d_constrained";
    case Scenario::Rtp1dUnconstrained:
      return "rtp1d_unconstrained";
    case Scenario::Rtp1dConstrained:
      return "rtp1d_constrained";
    case Scenario::Network:
      return "network";
  }
  return "?";
}

ResetClock SeriesConfig::make_clock(double r) const {
  switch (clock) {
    case ClockFamily::Exponential:
      return ResetClock::exponential(r);
    case ClockFamily::Deterministic:
      return ResetClock::deterministic(r);
    case ClockFamily::GammaUnitMean:
      return ResetClock::gamma_unit_mean(clock_shape, r);
  }
  return ResetClock::exponential(r);
}

std::string SweepConfig::echo() const {
  std::ostringstream os;
  os << "config " << path << ": " << r_grid.size() << " rates in [" << fmt(r_grid.front()) << ", "
     << fmt(r_grid.back()) << "], " << series.size() << " series";
  for (const auto& s : series) os << "\n  series " << s.name << ": " << scenario_name(s.scenario);
  if (mc) {
    os << "\n  mc: n=" << mc->sim.n_replicates << " seed=" << mc->sim.seed
       << " dt=" << fmt(mc->sim.dt) << " max_events=" << mc->sim.max_events;
    if (mc->r_max > 0) os << " r_max=" << fmt(mc->r_max);
  } else {
    os << "\n  mc: off";
  }
  if (!defaults_applied.empty()) {
    os << "\n  defaults applied:";
    for (const auto& d : defaults_applied) os << " " << d;
  }
  return os.str();
}

SweepConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

SweepConfig parse_config_text(const std::string& text, const std::string& path) {
  const ConfigError err(path);
  std::vector<Section> sections;
  std::istringstream lines(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') err.fail(line_no, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      for (const auto& s : sections)
        if (s.name == name) err.fail(line_no, "duplicate section [" + name + "]");
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) err.fail(line_no, "expected 'key = value' or '[section]'");
    if (sections.empty()) err.fail(line_no, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) err.fail(line_no, "missing key before '='");
    if (value.empty()) err.fail(line_no, "missing value for '" + key + "'");
    auto& entries = sections.back().entries;
    if (entries.count(key)) err.fail(line_no, "duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }

  SweepConfig cfg;
  cfg.path = path;
  const Section* sweep = nullptr;
  const Section* mc = nullptr;
  std::vector<const Section*> series;
  for (const auto& s : sections) {
    if (s.name == "sweep")
      sweep = &s;
    else if (s.name == "mc")
      mc = &s;
    else if (s.name.rfind("series.", 0) == 0)
      series.push_back(&s);
    else
      err.fail(s.line, "unknown section [" + s.name + "]; expected [sweep], [series.<name>] or [mc]");
  }

  // -- [sweep]
  if (!sweep) err.fail(0, "missing [sweep] section");
  check_keys(err, *sweep, {"r_grid", "r_min", "r_max", "r_points"});
  const auto& se = sweep->entries;
  if (se.count("r_grid")) {
    for (const char* k : {"r_min", "r_max", "r_points"})
      if (se.count(k)) err.fail(se.at(k).line, std::string("'") + k + "' conflicts with 'r_grid'");
    const Entry& g = se.at("r_grid");
    std::stringstream items(g.value);
    std::string item;
    while (std::getline(items, item, ',')) {
      const double r = positive(err, "r_grid", {trim(item), g.line});
      if (!cfg.r_grid.empty() && !(r > cfg.r_grid.back()))
        err.fail(g.line, "'r_grid' must be strictly increasing");
      cfg.r_grid.push_back(r);
    }
  } else {
    for (const char* k : {"r_min", "r_max", "r_points"})
      if (!se.count(k))
        err.fail(sweep->line, std::string("[sweep] needs 'r_grid' or r_min/r_max/r_points (missing '") + k + "')");
    const double lo = positive(err, "r_min", se.at("r_min"));
    const double hi = positive(err, "r_max", se.at("r_max"));
    const auto n = parse_uint(err, "r_points", se.at("r_points"));
    if (!(hi > lo)) err.fail(se.at("r_max").line, "'r_max' must exceed 'r_min'");
    if (n < 2 || n > 100000) err.fail(se.at("r_points").line, "'r_points' must be in [2, 100000]");
    for (std::uint64_t i = 0; i < n; ++i)
      cfg.r_grid.push_back(i + 1 == n ? hi
                                      : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                                                    static_cast<double>(i) / (n - 1)));
  }
  if (cfg.r_grid.empty()) err.fail(sweep->line, "empty rate grid");

  // -- [series.*]
  if (series.empty()) err.fail(0, "no [series.<name>] section");
  const fs::path base = fs::path(path).parent_path();
  for (const Section* s : series) {
    SeriesConfig sc;
    sc.name = s->name.substr(7);
    sc.line = s->line;
    if (!valid_series_name(sc.name))
      err.fail(s->line, "series name '" + sc.name + "' may only use letters, digits, '_' and '-'");
    const auto& e = s->entries;
    if (!e.count("scenario")) err.fail(s->line, "[" + s->name + "] needs 'scenario'");
    const std::string scen = e.at("scenario").value;
    std::vector<std::string> allowed = {"scenario", "clock", "clock_shape"};
    std::vector<std::string> required;
    if (scen == "bm1d_unconstrained" || scen == "bm1d_constrained") {
      sc.scenario = scen == "bm1d_constrained" ? Scenario::Bm1dConstrained
                                                : Scenario::Bm1dUnconstrained;
      required = {"a", "b", "D"};
      allowed.insert(allowed.end(), {"a", "b", "D", "R"});
    } else if (scen == "rtp1d_unconstrained" || scen == "rtp1d_constrained") {
      sc.scenario = scen == "rtp1d_constrained" ? Scenario::Rtp1dConstrained
                                                 : Scenario::Rtp1dUnconstrained;
      required = {"a", "v", "gamma"};
      allowed.insert(allowed.end(), {"a", "v", "gamma", "R"});
      if (sc.scenario == Scenario::Rtp1dUnconstrained) allowed.push_back("formula");
    } else if (scen == "network") {
      sc.scenario = Scenario::Network;
      required = {"network"};
      allowed.push_back("network");
    } else {
      err.fail(e.at("scenario").line,
               "unknown scenario '" + scen +
                   "'; expected bm1d_unconstrained, bm1d_constrained, rtp1d_unconstrained, "
                   "rtp1d_constrained or network");
    }
    check_keys(err, *s, allowed);
    for (const auto& k : required)
      if (!e.count(k)) err.fail(s->line, "[" + s->name + "] is missing '" + k + "'");

    auto num = [&](const char* k) { return positive(err, k, e.at(k)); };
    if (e.count("a")) sc.a = num("a");
    sc.b = e.count("b") ? num("b") : sc.a;
    if (e.count("D")) sc.diffusivity = num("D");
    if (e.count("v")) sc.speed = num("v");
    if (e.count("gamma")) sc.switch_rate = num("gamma");
    if (e.count("R")) {
      sc.detection_radius = parse_double(err, "R", e.at("R"));
      if (sc.detection_radius < 0 || sc.detection_radius >= std::min(sc.a, sc.b))
        err.fail(e.at("R").line, "'R' must satisfy 0 <= R < min(a, b)");
    }
    if (e.count("formula")) {
      const auto& f = e.at("formula");
      if (f.value == "published")
        sc.rtp_formula = RtpFormula::Published;
      else if (f.value == "exact")
        sc.rtp_formula = RtpFormula::Exact;
      else
        err.fail(f.line, "'formula' must be 'published' or 'exact'");
    }
    if (e.count("clock")) {
      const auto& c = e.at("clock");
      if (c.value == "exponential")
        sc.clock = ClockFamily::Exponential;
      else if (c.value == "deterministic")
        sc.clock = ClockFamily::Deterministic;
      else if (c.value == "gamma")
        sc.clock = ClockFamily::GammaUnitMean;
      else
        err.fail(c.line, "'clock' must be exponential, deterministic or gamma");
    }
    if (e.count("clock_shape")) {
      if (sc.clock != ClockFamily::GammaUnitMean)
        err.fail(e.at("clock_shape").line, "'clock_shape' only applies to clock = gamma");
      sc.clock_shape = num("clock_shape");
    }
    if (sc.scenario == Scenario::Network) {
      const auto& n = e.at("network");
      fs::path p(n.value);
      if (p.is_relative()) p = base / p;
      sc.network_path = p.string();
      try {
        sc.network = read_network_file(sc.network_path);
      } catch (const ValidationError& ex) {
        err.fail(n.line, ex.what());
      }
    }
    for (const auto& other : cfg.series)
      if (other.name == sc.name) err.fail(s->line, "duplicate series '" + sc.name + "'");
    cfg.series.push_back(std::move(sc));
  }

  // -- [mc]
  if (mc) {
    check_keys(err, *mc, {"n", "seed", "dt", "max_events", "r_max", "network_sampler"});
    McSettings m;
    const auto& e = mc->entries;
    if (e.count("n")) {
      m.sim.n_replicates = parse_uint(err, "n", e.at("n"));
      if (m.sim.n_replicates < 2) err.fail(e.at("n").line, "'n' must be at least 2");
    } else {
      cfg.defaults_applied.push_back("n=10000");
    }
    if (e.count("seed"))
      m.sim.seed = parse_uint(err, "seed", e.at("seed"));
    else
      cfg.defaults_applied.push_back("seed=0");
    if (e.count("dt"))
      m.sim.dt = positive(err, "dt", e.at("dt"));
    else
      cfg.defaults_applied.push_back("dt=0.0001");
    if (e.count("max_events")) {
      m.sim.max_events = parse_uint(err, "max_events", e.at("max_events"));
      if (m.sim.max_events == 0) err.fail(e.at("max_events").line, "'max_events' must be positive");
    }
    if (e.count("r_max")) m.r_max = positive(err, "r_max", e.at("r_max"));
    if (e.count("network_sampler")) {
      const auto& v = e.at("network_sampler");
      if (v.value == "auto")
        m.network_sampler = NetworkSamplerMethod::Auto;
      else if (v.value == "direct")
        m.network_sampler = NetworkSamplerMethod::Direct;
      else if (v.value == "renewal")
        m.network_sampler = NetworkSamplerMethod::Renewal;
      else
        err.fail(v.line, "'network_sampler' must be auto, direct or renewal");
    }
    cfg.mc = m;
  }
  return cfg;
}

// ---------------------------------------------------------------------------

std::string run_sweep(const SweepConfig& config, std::ostream& notes) {
  std::ostringstream csv;
  csv << kSweepCsvHeader << "\n";
  for (std::size_t si = 0; si < config.series.size(); ++si) {
    const SeriesConfig& s = config.series[si];
    IntervalTarget target{s.a, s.b,
                          s.scenario == Scenario::Bm1dConstrained ||
                              s.scenario == Scenario::Rtp1dConstrained,
                          s.detection_radius};
    std::optional<GeodesicAnalysis> analysis;
    if (s.network) analysis = validate_network(*s.network);

    for (std::size_t ri = 0; ri < config.r_grid.size(); ++ri) {
      const double r = config.r_grid[ri];
      const ResetClock clock = s.make_clock(r);
      auto note = [&](const std::string& what, const std::string& why) {
        notes << "note: series " << s.name << ", r = " << fmt(r) << ": " << what << " left empty ("
              << why << ")\n";
      };
      std::string exact, asym, mc_mean, mc_se, n_samples, rel;
      // logs are kept so the relative error survives overflow of the means
      double log_exact = NAN, log_asym = NAN;

      if (!clock.is_exponential()) {
        note("exact and asymptotic", "closed forms need an exponential clock");
      } else {
        try {
          switch (s.scenario) {
            case Scenario::Bm1dUnconstrained:
            case Scenario::Bm1dConstrained:
              log_exact = log_mean_cover_time(BrownianSpec{s.diffusivity}, target, clock);
              break;
            case Scenario::Rtp1dUnconstrained:
            case Scenario::Rtp1dConstrained:
              log_exact = log_mean_cover_time(RtpSpec{s.speed, s.switch_rate}, target,
                                          clock, s.rtp_formula);
              break;
            case Scenario::Network:
              log_exact = std::log(mct_exact_moments(*s.network, r, 1)[0]);
              break;
          }
          if (!std::isfinite(std::exp(log_exact))) note("exact", "value exceeds the double range");
        } catch (const NumericRefusal& e) {
          note("exact", e.what());
          log_exact = NAN;
        }
        try {
          const double ea = s.a - s.detection_radius;
          const double eb = s.b - s.detection_radius;
          switch (s.scenario) {
            case Scenario::Bm1dUnconstrained:
            case Scenario::Bm1dConstrained: {
              const auto setting = AsymptoticSetting::bm1d(ea, eb, s.diffusivity);
              log_asym = log_mct_frequent_reset_approx(
                  1, r, log_success_prob_asymptotic(setting, r),
                  far_points_prefactor(setting.far_points(), 1));
              break;
            }
            case Scenario::Rtp1dUnconstrained:
            case Scenario::Rtp1dConstrained: {
              const auto setting = AsymptoticSetting::rtp1d(ea, s.speed, s.switch_rate);
              log_asym = log_mct_frequent_reset_approx(
                  1, r, log_success_prob_asymptotic(setting, r),
                  far_points_prefactor(setting.far_points(), 1));
              break;
            }
            case Scenario::Network:
              log_asym = std::log(theorem2_moment(*s.network, *analysis, 1, r));
              break;
          }
          if (!std::isfinite(std::exp(log_asym)))
            note("asymptotic", "value exceeds the double range");
        } catch (const NumericRefusal& e) {
          note("asymptotic", e.what());
          log_asym = NAN;
        }
      }
      if (std::isfinite(std::exp(log_exact))) exact = fmt(std::exp(log_exact));
      if (std::isfinite(std::exp(log_asym))) asym = fmt(std::exp(log_asym));
      if (std::isfinite(log_exact) && std::isfinite(log_asym))
        rel = fmt(std::abs(std::expm1(log_asym - log_exact)));

      if (config.mc && (config.mc->r_max == 0 || r <= config.mc->r_max)) {
        SimConfig sim = config.mc->sim;
        sim.seed = point_seed(config.mc->sim.seed, si, ri);
        std::function<CoverSample(RandomStream&)> sampler;
        switch (s.scenario) {
          case Scenario::Bm1dUnconstrained:
          case Scenario::Bm1dConstrained:
            sampler = [&, spec = BrownianSpec{s.diffusivity}](RandomStream& rng) {
              return simulate_bm_cover(spec, target, clock, sim, rng);
            };
            break;
          case Scenario::Rtp1dUnconstrained:
          case Scenario::Rtp1dConstrained:
            sampler = [&, spec = RtpSpec{s.speed, s.switch_rate}](RandomStream& rng) {
              return simulate_rtp_cover(spec, target, clock, sim, rng);
            };
            break;
          case Scenario::Network:
            sampler = make_network_sampler(*s.network, clock, sim, config.mc->network_sampler);
            break;
        }
        try {
          const McResult res = estimate_mct(sampler, sim);
          mc_mean = fmt(res.moments[0].mean);
          mc_se = fmt(res.moments[0].std_error);
          n_samples = std::to_string(res.moments[0].n_samples);
          if (res.n_incomplete > 0)
            notes << "note: series " << s.name << ", r = " << fmt(r) << ": " << res.n_incomplete
                  << " incomplete samples excluded\n";
        } catch (const NumericRefusal& e) {
          note("Monte Carlo", e.what());
        }
      }
      csv << s.name << "," << scenario_name(s.scenario) << "," << fmt(r) << "," << exact << ","
          << asym << "," << mc_mean << "," << mc_se << "," << n_samples << "," << rel << "\n";
    }
  }
  return csv.str();
}

// ---------------------------------------------------------------------------

std::vector<std::string> emit_plot_data(const std::string& csv, const std::string& directory,
                                        const std::string& style) {
  if (style != "gnuplot") throw ValidationError("unknown plot style '" + style + "'");
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSweepCsvHeader)
    throw ValidationError("plot: CSV header does not match the sweep schema");

  struct Curve {
    std::vector<std::string> r, exact, asym, mc_mean, mc_se, rel;
  };
  std::vector<std::string> order;
  std::map<std::string, Curve> curves;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 9) {
      std::ostringstream os;
      os << "plot: CSV line " << line_no << " has " << f.size() << " fields, expected 9";
      throw ValidationError(os.str());
    }
    if (!valid_series_name(f[0])) {
      std::ostringstream os;
      os << "plot: CSV line " << line_no << ": bad series name '" << f[0] << "'";
      throw ValidationError(os.str());
    }
    if (!curves.count(f[0])) order.push_back(f[0]);
    auto& c = curves[f[0]];
    c.r.push_back(f[2]);
    c.exact.push_back(f[3]);
    c.asym.push_back(f[4]);
    c.mc_mean.push_back(f[5]);
    c.mc_se.push_back(f[6]);
    c.rel.push_back(f[8]);
  }
  if (order.empty()) throw ValidationError("plot: CSV has no data rows");

  fs::create_directories(directory);
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& body) {
    const fs::path p = fs::path(directory) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("plot: cannot write " + p.string());
    out << body;
    written.push_back(p.string());
  };
  auto two_column = [](const std::vector<std::string>& x, const std::vector<std::string>& y) {
    std::string body;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!y[i].empty()) body += x[i] + " " + y[i] + "\n";
    return body;
  };
  auto any = [](const std::vector<std::string>& v) {
    return std::any_of(v.begin(), v.end(), [](const std::string& s) { return !s.empty(); });
  };

  std::ostringstream script, comments;
  std::vector<std::string> plots;
  for (const auto& name : order) {
    const auto& c = curves[name];
    if (any(c.exact)) {
      write(name + "_exact.dat", "# r exact\n" + two_column(c.r, c.exact));
      plots.push_back("'" + name + "_exact.dat' using 1:2 with lines title '" + name + " exact'");
    } else {
      comments << "# " << name << ": exact column empty, no curve file\n";
    }
  }
  // identical asymptotic curves share one file
  std::vector<std::pair<std::string, std::string>> asym_files;  // body, first series
  for (const auto& name : order) {
    const auto& c = curves[name];
    if (!any(c.asym)) {
      comments << "# " << name << ": asymptotic column empty, no curve file\n";
      continue;
    }
    const std::string body = "# r asymptotic\n" + two_column(c.r, c.asym);
    bool dup = false;
    for (const auto& f : asym_files) dup = dup || f.first == body;
    if (!dup) asym_files.emplace_back(body, name);
  }
  for (const auto& [body, first] : asym_files) {
    const std::string file = asym_files.size() == 1 ? "asymptotic.dat" : "asymptotic_" + first + ".dat";
    write(file, body);
    plots.push_back("'" + file + "' using 1:2 with lines dashtype 2 title 'asymptotic" +
                    (asym_files.size() == 1 ? std::string() : " (" + first + ")") + "'");
  }
  for (const auto& name : order) {
    const auto& c = curves[name];
    if (!any(c.mc_mean)) continue;
    std::string body = "# r mc_mean mc_se\n";
    for (std::size_t i = 0; i < c.r.size(); ++i)
      if (!c.mc_mean[i].empty()) body += c.r[i] + " " + c.mc_mean[i] + " " + c.mc_se[i] + "\n";
    write(name + "_mc.dat", body);
    plots.push_back("'" + name + "_mc.dat' using 1:2:3 with yerrorbars title '" + name + " MC'");
  }

  bool has_rel = false;
  for (const auto& name : order) has_rel = has_rel || any(curves[name].rel);
  std::vector<std::string> rel_plots;
  if (has_rel) {
    std::vector<std::string> grid;
    for (const auto& name : order)
      for (const auto& r : curves[name].r)
        if (std::find(grid.begin(), grid.end(), r) == grid.end()) grid.push_back(r);
    std::string body = "# r";
    for (const auto& name : order) body += " " + name;
    body += "\n";
    for (const auto& r : grid) {
      body += r;
      for (const auto& name : order) {
        const auto& c = curves[name];
        auto it = std::find(c.r.begin(), c.r.end(), r);
        const std::string v = it == c.r.end() ? "" : c.rel[it - c.r.begin()];
        body += " " + (v.empty() ? std::string("?") : v);
      }
      body += "\n";
    }
    write("relerr.dat", body);
    for (std::size_t k = 0; k < order.size(); ++k)
      if (any(curves[order[k]].rel))
        rel_plots.push_back("'relerr.dat' using 1:" + std::to_string(k + 2) +
                            " with linespoints title '" + order[k] + "'");
  }

  script << "# gnuplot script; run from this directory: gnuplot plot.gp\n" << comments.str();
  script << "set datafile missing '?'\nset logscale xy\nset format y '10^{%L}'\n"
         << "set key top left\nset terminal pngcairo size 900,600\n"
         << "set output 'mct.png'\nset xlabel 'r'\nset ylabel 'mean cover time'\n";
  for (std::size_t i = 0; i < plots.size(); ++i)
    script << (i == 0 ? "plot " : ", \\\n     ") << plots[i];
  script << "\n";
  if (!rel_plots.empty()) {
    script << "set output 'relerr.png'\nset ylabel 'relative error of the asymptotic'\n";
    for (std::size_t i = 0; i < rel_plots.size(); ++i)
      script << (i == 0 ? "plot " : ", \\\n     ") << rel_plots[i];
    script << "\n";
  }
  write("plot.gp", script.str());
  return written;
}

}  // namespace covertime
