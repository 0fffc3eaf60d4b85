#include "covertime/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "covertime/error.hpp"

namespace covertime {

namespace {

constexpr std::uint64_t kMaxCount = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kExactFailedCycles = 64;

double exp_draw(double rate, RandomStream& rng) {
  return -std::log(uniform_open_closed(rng)) / rate;
}

void add_saturating(std::uint64_t& count, std::uint64_t n) {
  count = n > kMaxCount - count ? kMaxCount : count + n;
}

int draw_velocity(InitialVelocity v, RandomStream& rng) {
  switch (v) {
    case InitialVelocity::Plus:
      return 1;
    case InitialVelocity::Minus:
      return -1;
    case InitialVelocity::SymmetricRandom:
      break;
  }
  return (rng() >> 63) ? 1 : -1;
}

// Weighted jump table for one state.
struct JumpRow {
  std::vector<int> to;
  std::vector<double> cumulative;
  double total = 0;

  void add(int j, double w) {
    if (!(w > 0.0)) return;
    total += w;
    to.push_back(j);
    cumulative.push_back(total);
  }
  int pick(RandomStream& rng) const {
    const double u = std::generate_canonical<double, 53>(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return to[it - cumulative.begin()];
  }
};

}  // namespace

void SimConfig::validate() const {
  if (n_replicates < 2) throw ValidationError("Monte Carlo needs at least 2 replicates");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step dt must be positive");
  if (max_events == 0) throw ValidationError("max_events must be positive");
}

// ---------------------------------------------------------------------------

CoverSample simulate_bm_cover(const BrownianSpec& spec, const IntervalTarget& target,
                              const ResetClock& clock, const SimConfig& cfg, RandomStream& rng) {
  spec.validate();
  target.validate();
  cfg.validate();
  const double lo = -target.effective_a();
  const double hi = target.effective_b();
  const double noise = std::sqrt(2.0 * spec.diffusivity);
  const double full_step = noise * std::sqrt(cfg.dt);
  boost::random::normal_distribution<double> normal;

  CoverSample s;
  bool hit_a = false, hit_b = false;
  double t = 0.0, x = 0.0;
  double until_reset = clock.sample(rng);
  for (std::uint64_t step = 0; step < cfg.max_events; ++step) {
    double h = cfg.dt;
    double scale = full_step;
    if (until_reset < cfg.dt) {
      h = until_reset;
      scale = noise * std::sqrt(h);
    }
    x += scale * normal(rng);
    if (!hit_a && x <= lo) {
      hit_a = true;
      if (!hit_b) s.first_boundary_hit = BoundaryHit::A;
    }
    if (!hit_b && x >= hi) {
      hit_b = true;
      if (!hit_a) s.first_boundary_hit = BoundaryHit::B;
    }
    t += h;
    if (hit_a && hit_b) {
      s.cover_time = t;
      return s;
    }
    if (target.constrained) {
      while (x < lo || x > hi) x = x < lo ? 2.0 * lo - x : 2.0 * hi - x;
    }
    until_reset -= h;
    if (until_reset <= 0.0) {
      x = 0.0;
      ++s.n_resets;
      until_reset = clock.sample(rng);
    }
  }
  s.cover_time = t;
  s.complete = false;
  return s;
}

// ---------------------------------------------------------------------------

CoverSample simulate_rtp_cover(const RtpSpec& spec, const IntervalTarget& target,
                               const ResetClock& clock, const SimConfig& cfg, RandomStream& rng) {
  spec.validate();
  target.validate();
  cfg.validate();
  const double lo = -target.effective_a();
  const double hi = target.effective_b();
  const double v = spec.speed;

  CoverSample s;
  bool hit_a = false, hit_b = false;
  double t = 0.0, x = 0.0;
  int dir = draw_velocity(spec.initial_velocity, rng);
  double until_reset = clock.sample(rng);

  // Marks the endpoint in direction `d` as reached; true once both are.
  auto reach = [&](int d) {
    if (d > 0) {
      if (!hit_a && !hit_b) s.first_boundary_hit = BoundaryHit::B;
      hit_b = true;
    } else {
      if (!hit_a && !hit_b) s.first_boundary_hit = BoundaryHit::A;
      hit_a = true;
    }
    return hit_a && hit_b;
  };

  for (std::uint64_t event = 0; event < cfg.max_events; ++event) {
    const double tumble = exp_draw(spec.switch_rate, rng);
    const bool is_reset = until_reset <= tumble;
    const double h = is_reset ? until_reset : tumble;

    // straight runs, reversing at walls in constrained mode
    double elapsed = 0.0;
    while (true) {
      const double wall = dir > 0 ? hi : lo;
      const double distance = dir > 0 ? hi - x : x - lo;
      const bool already = dir > 0 ? hit_b : hit_a;
      const double remaining = h - elapsed;
      if (distance <= v * remaining && (target.constrained || !already)) {
        const double tw = distance / v;
        if (reach(dir)) {
          s.cover_time = t + elapsed + tw;
          return s;
        }
        if (!target.constrained) {
          x += dir * v * remaining;
          break;
        }
        elapsed += tw;
        x = wall;
        dir = -dir;
        continue;
      }
      x += dir * v * remaining;
      break;
    }
    t += h;
    if (is_reset) {
      x = 0.0;
      dir = draw_velocity(spec.initial_velocity, rng);
      ++s.n_resets;
      until_reset = clock.sample(rng);
    } else {
      until_reset -= h;
      dir = -dir;
    }
  }
  s.cover_time = t;
  s.complete = false;
  return s;
}

// ---------------------------------------------------------------------------

DirectNetworkSampler::DirectNetworkSampler(const NetworkSpec& spec, const ResetClock& clock,
                                           std::uint64_t max_events)
    : clock_(clock), max_events_(max_events) {
  validate_network(spec);
  const int n = spec.n_states();
  rows_.resize(n);
  for (int i = 0; i < n; ++i) {
    JumpRow row;
    for (int j = 0; j < n; ++j)
      if (j != i) row.add(j, spec.generator(i, j));
    rows_[i] = {std::move(row.to), std::move(row.cumulative), row.total};
  }
  target_bit_.assign(n, -1);
  for (std::size_t k = 0; k < spec.targets.size(); ++k)
    target_bit_[spec.targets[k]] = static_cast<int>(k);
  start_ = spec.start;
  n_targets_ = static_cast<int>(spec.targets.size());
}

CoverSample DirectNetworkSampler::operator()(RandomStream& rng) const {
  CoverSample s;
  std::vector<char> seen(n_targets_, 0);
  int missing = n_targets_;
  auto mark = [&](int i) {
    const int b = target_bit_[i];
    if (b >= 0 && !seen[b]) {
      seen[b] = 1;
      --missing;
    }
  };
  int i = start_;
  mark(i);
  if (missing == 0) return s;

  double t = 0.0;
  double until_reset = clock_.sample(rng);
  for (std::uint64_t event = 0; event < max_events_; ++event) {
    const Row& row = rows_[i];
    const double hold = row.total > 0.0 ? exp_draw(row.total, rng)
                                        : std::numeric_limits<double>::infinity();
    if (hold >= until_reset) {
      t += until_reset;
      i = start_;
      ++s.n_resets;
      until_reset = clock_.sample(rng);
      continue;
    }
    t += hold;
    until_reset -= hold;
    const double u = std::generate_canonical<double, 53>(rng) * row.total;
    auto it = std::upper_bound(row.cumulative.begin(), row.cumulative.end(), u);
    if (it == row.cumulative.end()) --it;
    i = row.to[it - row.cumulative.begin()];
    mark(i);
    if (missing == 0) {
      s.cover_time = t;
      return s;
    }
  }
  s.cover_time = t;
  s.complete = false;
  return s;
}

CoverSample simulate_network_cover(const NetworkSpec& spec, const ResetClock& clock,
                                   const SimConfig& cfg, RandomStream& rng) {
  cfg.validate();
  return DirectNetworkSampler(spec, clock, cfg.max_events)(rng);
}

// ---------------------------------------------------------------------------

struct NetworkRenewalSampler::Impl {
  // Everything needed to leave the start with visited-target mask V.
  struct Level {
    double p = 0;             // P(new target before reset)
    double fail_mean = 0;     // E[cycle length | reset first]
    double fail_var = 0;
    std::vector<JumpRow> success;  // success-conditioned chain, by state
    std::vector<JumpRow> failure;  // failure-conditioned chain; -1 = reset
  };

  NetworkSpec spec;
  double r = 0;
  std::uint64_t max_events = 0;
  std::vector<JumpRow> plain;   // unconditioned jumps
  std::vector<int> target_bit;  // -1 for non-targets
  std::uint64_t full = 0;
  mutable std::mutex mutex;
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<Level>> cache;

  const Level& level(std::uint64_t visited) const {
    {
      std::lock_guard lock(mutex);
      auto it = cache.find(visited);
      if (it != cache.end()) return *it->second;
    }
    auto built = build(visited);
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.emplace(visited, std::move(built));
    return *it->second;
  }

  std::unique_ptr<Level> build(std::uint64_t visited) const {
    const int n = spec.n_states();
    std::vector<char> in_omega(n, 0);
    for (int i = 0; i < n; ++i)
      if (target_bit[i] >= 0 && !(visited >> target_bit[i] & 1u)) in_omega[i] = 1;
    const KilledChain kc = build_killed_chain(spec, in_omega, r, false);
    const auto& solver = *kc.solver;
    const Eigen::VectorXd u = solver.solve(kc.into_target);
    const Eigen::VectorXd f = solver.solve(Eigen::VectorXd::Constant(solver.size(), r));
    const Eigen::VectorXd b1 = solver.solve(f);
    const Eigen::VectorXd b2 = solver.solve(2.0 * b1);
    const int s = kc.local[spec.start];

    auto L = std::make_unique<Level>();
    L->p = u(s);
    if (!(L->p > 0.0)) throw NumericRefusal("remaining targets are unreachable");
    if (f(s) > 0.0) {
      L->fail_mean = b1(s) / f(s);
      L->fail_var = std::max(0.0, b2(s) / f(s) - L->fail_mean * L->fail_mean);
    }
    L->success.resize(n);
    L->failure.resize(n);
    const auto& Q = spec.generator;
    for (std::size_t a = 0; a < kc.interior.size(); ++a) {
      const int i = kc.interior[a];
      for (int j = 0; j < n; ++j) {
        if (j == i || Q(i, j) <= 0.0) continue;
        const int lj = kc.local[j];
        const double uj = in_omega[j] ? 1.0 : (lj >= 0 ? u(lj) : 0.0);
        if (u(a) > 0.0) L->success[i].add(j, Q(i, j) * uj / u(a));
        if (lj >= 0) L->failure[i].add(j, Q(i, j) * f(lj) / f(a));
      }
      L->failure[i].add(-1, r / f(a));
    }
    return L;
  }

  CoverSample sample(RandomStream& rng) const {
    CoverSample s;
    std::uint64_t visited = 0;
    auto mark = [&](int i) {
      if (target_bit[i] >= 0) visited |= std::uint64_t{1} << target_bit[i];
    };
    mark(spec.start);
    double t = 0.0;
    std::uint64_t events = 0;
    while (visited != full) {
      if (++events > max_events) {
        s.cover_time = t;
        s.complete = false;
        return s;
      }
      const Level& L = level(visited);

      // failed cycles
      std::uint64_t n_fail = 0;
      if (L.p < 1.0) {
        const double g = std::floor(std::log(uniform_open_closed(rng)) / std::log1p(-L.p));
        n_fail = g >= 1.8e19 ? kMaxCount : static_cast<std::uint64_t>(g);
      }
      add_saturating(s.n_resets, n_fail);
      if (n_fail <= kExactFailedCycles) {
        for (std::uint64_t c = 0; c < n_fail; ++c) {
          int i = spec.start;
          while (i >= 0) {
            if (++events > max_events) break;
            t += exp_draw(L.failure[i].total, rng);
            i = L.failure[i].pick(rng);
          }
        }
      } else {
        const double n = static_cast<double>(n_fail);
        if (L.fail_var > 0.0) {
          const double mean = n * L.fail_mean;
          const double var = n * L.fail_var;
          std::gamma_distribution<double> gamma(mean * mean / var, var / mean);
          t += gamma(rng);
        } else {
          t += n * L.fail_mean;
        }
      }

      // successful excursion
      int i = spec.start;
      do {
        t += exp_draw(L.success[i].total, rng);
        i = L.success[i].pick(rng);
        ++events;
      } while (target_bit[i] < 0 || (visited >> target_bit[i] & 1u));
      mark(i);

      // plain dynamics until the next reset
      while (visited != full) {
        if (++events > max_events) break;
        const double total = plain[i].total;
        const double jump = total > 0.0 ? exp_draw(total, rng)
                                         : std::numeric_limits<double>::infinity();
        const double reset = exp_draw(r, rng);
        if (reset < jump) {
          t += reset;
          add_saturating(s.n_resets, 1);
          break;
        }
        t += jump;
        i = plain[i].pick(rng);
        mark(i);
      }
    }
    s.cover_time = t;
    return s;
  }
};

NetworkRenewalSampler::NetworkRenewalSampler(const NetworkSpec& spec, const ResetClock& clock,
                                             std::uint64_t max_events)
    : impl_(std::make_unique<Impl>()) {
  validate_network(spec);
  if (!clock.is_exponential())
    throw ValidationError("the renewal network sampler needs an exponential resetting clock");
  if (spec.targets.size() > 64)
    throw ValidationError("the renewal network sampler supports at most 64 targets");
  auto& m = *impl_;
  m.spec = spec;
  m.r = clock.rate();
  m.max_events = max_events;
  const int n = spec.n_states();
  m.plain.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) m.plain[i].add(j, spec.generator(i, j));
  m.target_bit.assign(n, -1);
  for (std::size_t k = 0; k < spec.targets.size(); ++k) {
    m.target_bit[spec.targets[k]] = static_cast<int>(k);
    m.full |= std::uint64_t{1} << k;
  }
}

NetworkRenewalSampler::~NetworkRenewalSampler() = default;
NetworkRenewalSampler::NetworkRenewalSampler(NetworkRenewalSampler&&) noexcept = default;

CoverSample NetworkRenewalSampler::operator()(RandomStream& rng) const {
  return impl_->sample(rng);
}

std::function<CoverSample(RandomStream&)> make_network_sampler(const NetworkSpec& spec,
                                                               const ResetClock& clock,
                                                               const SimConfig& cfg,
                                                               NetworkSamplerMethod method) {
  cfg.validate();
  if (method == NetworkSamplerMethod::Auto)
    method = clock.is_exponential() && spec.targets.size() <= 64 ? NetworkSamplerMethod::Renewal
                                                                 : NetworkSamplerMethod::Direct;
  if (method == NetworkSamplerMethod::Renewal) {
    auto sampler = std::make_shared<NetworkRenewalSampler>(spec, clock, cfg.max_events);
    return [sampler](RandomStream& rng) { return (*sampler)(rng); };
  }
  auto sampler = std::make_shared<DirectNetworkSampler>(spec, clock, cfg.max_events);
  return [sampler](RandomStream& rng) { return (*sampler)(rng); };
}

// ---------------------------------------------------------------------------

McResult estimate_mct(const std::function<CoverSample(RandomStream&)>& sampler,
                      const SimConfig& cfg, int max_order, unsigned n_threads) {
  cfg.validate();
  if (max_order < 1) throw ValidationError("moment order must be >= 1");
  const std::size_t n = cfg.n_replicates;
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));

  std::vector<CoverSample> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        RandomStream rng = make_stream(cfg.seed, i);
        out[i] = sampler(rng);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  McResult res;
  res.samples.reserve(n);
  for (const auto& s : out) {
    if (s.complete)
      res.samples.push_back(s.cover_time);
    else
      ++res.n_incomplete;
  }
  if (res.n_incomplete * 100 > n) {
    std::ostringstream os;
    os << res.n_incomplete << " of " << n
       << " samples hit max_events before coverage (more than 1%); raise max_events";
    throw NumericRefusal(os.str());
  }
  for (int m = 1; m <= max_order; ++m)
    res.moments.push_back(accumulate_estimate(res.samples, m, cfg.seed));
  return res;
}

}  // namespace covertime
