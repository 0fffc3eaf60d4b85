#pragma once

#include <random>
#include <vector>

#include "covertime/network.hpp"

namespace testnet {

using covertime::NetworkSpec;
using covertime::StateSet;

/// 0 -> 1 -> ... -> h, every hop at rate k, last state absorbing.
NetworkSpec path_graph(int h, double k, StateSet targets = {});

/// Random strongly connected chain: a directed ring in random order plus
/// extra edges with probability `density`, rates uniform in [lo, hi].
/// Start 0; `n_targets` distinct non-start targets.
NetworkSpec random_network(std::mt19937_64& rng, int n, int n_targets, double density = 0.3,
                           double lo = 0.1, double hi = 10.0);

/// Lambda(J) by enumerating every path of length h(i0, J) (exhaustive).
double lambda_by_enumeration(const NetworkSpec& spec, const StateSet& J, int* distance = nullptr);

/// Number of shortest paths from the start into J.
long long geodesic_count(const NetworkSpec& spec, const StateSet& J);

/// E[tau_r(J)^n], n = 1..m, from the resetting generator Q + r (E_start - I)
/// restricted to non-target states, solved by dense full-pivot LU.
std::vector<double> resetting_generator_moments(const NetworkSpec& spec, const StateSet& J,
                                                double r, int m);

/// Generator with the given off-diagonal rates; the diagonal is derived.
NetworkSpec from_rates(const Eigen::MatrixXd& rates, int start, StateSet targets);

}  // namespace testnet
