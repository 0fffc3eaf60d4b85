#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "covertime/network.hpp"
#include "covertime/reset_clock.hpp"
#include "covertime/rng.hpp"
#include "covertime/searchers.hpp"
#include "covertime/statistics.hpp"

namespace covertime {

enum class BoundaryHit { A, B, NA };

struct CoverSample {
  double cover_time = 0;
  std::uint64_t n_resets = 0;  // saturates at UINT64_MAX
  BoundaryHit first_boundary_hit = BoundaryHit::NA;
  /// False when max_events ran out before coverage.
  bool complete = true;
};

struct SimConfig {
  std::size_t n_replicates = 10000;
  std::uint64_t seed = 0;
  double dt = 1e-4;  // Brownian only
  /// Per-sample cap on time steps (Brownian) or events (RTP, network).
  std::uint64_t max_events = 100000000;

  void validate() const;
};

/// Euler-Maruyama with step dt, truncated at resets. Coverage is detected at
/// step resolution on the running min/max (bias O(sqrt(dt))); constrained
/// targets reflect at the walls.
CoverSample simulate_bm_cover(const BrownianSpec& spec, const IntervalTarget& target,
                              const ResetClock& clock, const SimConfig& cfg, RandomStream& rng);

/// Exact event-driven run-and-tumble sampler. Constrained targets reverse the
/// velocity at the walls.
CoverSample simulate_rtp_cover(const RtpSpec& spec, const IntervalTarget& target,
                               const ResetClock& clock, const SimConfig& cfg, RandomStream& rng);

/// Gillespie simulation with the reset clock racing the jumps. Builds the
/// jump tables on every call; use DirectNetworkSampler for repeated draws.
CoverSample simulate_network_cover(const NetworkSpec& spec, const ResetClock& clock,
                                   const SimConfig& cfg, RandomStream& rng);

class DirectNetworkSampler {
 public:
  DirectNetworkSampler(const NetworkSpec& spec, const ResetClock& clock,
                       std::uint64_t max_events);
  CoverSample operator()(RandomStream& rng) const;

 private:
  struct Row {
    std::vector<int> to;
    std::vector<double> cumulative;
    double total = 0;
  };
  std::vector<Row> rows_;
  std::vector<int> target_bit_;  // -1 for non-targets
  int start_ = 0;
  int n_targets_ = 0;
  ResetClock clock_;
  std::uint64_t max_events_;
};

/// Sampler for exponential clocks that skips failed reset cycles in bulk.
/// For the current visited set V it draws the number of failed cycles before
/// the next new target from its geometric law, the failed cycles' total
/// duration exactly (h-transformed excursions) when there are at most 64 of
/// them and from a moment-matched Gamma law otherwise, then the successful
/// excursion from the success-conditioned chain. Between that hit and the
/// next reset the chain is simulated directly. Per-V linear solves are cached.
class NetworkRenewalSampler {
 public:
  NetworkRenewalSampler(const NetworkSpec& spec, const ResetClock& clock,
                        std::uint64_t max_events);
  ~NetworkRenewalSampler();
  NetworkRenewalSampler(NetworkRenewalSampler&&) noexcept;
  CoverSample operator()(RandomStream& rng) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class NetworkSamplerMethod { Direct, Renewal, Auto };

/// Auto picks Renewal for exponential clocks and Direct otherwise.
std::function<CoverSample(RandomStream&)> make_network_sampler(const NetworkSpec& spec,
                                                               const ResetClock& clock,
                                                               const SimConfig& cfg,
                                                               NetworkSamplerMethod method);

struct McResult {
  /// One estimate per order 1..max_order.
  std::vector<MomentEstimate> moments;
  /// Completed cover times, in replicate order.
  std::vector<double> samples;
  std::size_t n_incomplete = 0;
};

/// Runs cfg.n_replicates samples, replicate i on make_stream(cfg.seed, i),
/// across worker threads, and reduces in replicate order, so the result does
/// not depend on the thread count. Incomplete samples are excluded and
/// counted; more than 1% of them is a NumericRefusal.
McResult estimate_mct(const std::function<CoverSample(RandomStream&)>& sampler,
                      const SimConfig& cfg, int max_order = 1, unsigned n_threads = 0);

}  // namespace covertime
