#include "support/networks.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <deque>
#include <numeric>

namespace testnet {

NetworkSpec from_rates(const Eigen::MatrixXd& rates, int start, StateSet targets) {
  NetworkSpec spec;
  const int n = static_cast<int>(rates.rows());
  spec.generator = rates;
  for (int i = 0; i < n; ++i) {
    spec.generator(i, i) = 0.0;
    spec.generator(i, i) = -spec.generator.row(i).sum();
  }
  spec.start = start;
  spec.targets = std::move(targets);
  return spec;
}

NetworkSpec path_graph(int h, double k, StateSet targets) {
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(h + 1, h + 1);
  for (int i = 0; i < h; ++i) rates(i, i + 1) = k;
  if (targets.empty()) targets = {h};
  return from_rates(rates, 0, targets);
}

NetworkSpec random_network(std::mt19937_64& rng, int n, int n_targets, double density, double lo,
                           double hi) {
  std::uniform_real_distribution<double> rate(lo, hi), coin(0.0, 1.0);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) rates(order[i], order[(i + 1) % n]) = rate(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && rates(i, j) == 0.0 && coin(rng) < density) rates(i, j) = rate(rng);
  std::vector<int> others(n - 1);
  std::iota(others.begin(), others.end(), 1);
  std::shuffle(others.begin(), others.end(), rng);
  others.resize(n_targets);
  return from_rates(rates, 0, others);
}

namespace {

std::vector<int> hops(const NetworkSpec& spec) {
  const int n = spec.n_states();
  std::vector<int> h(n, -1);
  h[spec.start] = 0;
  std::deque<int> q{spec.start};
  while (!q.empty()) {
    int i = q.front();
    q.pop_front();
    for (int j = 0; j < n; ++j)
      if (j != i && h[j] < 0 && spec.generator(i, j) > 0) {
        h[j] = h[i] + 1;
        q.push_back(j);
      }
  }
  return h;
}

void walk(const NetworkSpec& spec, const std::vector<char>& in_J, int at, int left, double weight,
          double& lambda, long long& count) {
  if (left == 0) {
    if (in_J[at]) {
      lambda += weight;
      ++count;
    }
    return;
  }
  for (int j = 0; j < spec.n_states(); ++j)
    if (j != at && spec.generator(at, j) > 0)
      walk(spec, in_J, j, left - 1, weight * spec.generator(at, j), lambda, count);
}

}  // namespace

double lambda_by_enumeration(const NetworkSpec& spec, const StateSet& J, int* distance) {
  const auto h = hops(spec);
  int d = 1 << 30;
  std::vector<char> in_J(spec.n_states(), 0);
  for (int j : J) {
    in_J[j] = 1;
    if (h[j] >= 0) d = std::min(d, h[j]);
  }
  if (distance) *distance = d;
  double lambda = 0;
  long long count = 0;
  walk(spec, in_J, spec.start, d, 1.0, lambda, count);
  return lambda;
}

long long geodesic_count(const NetworkSpec& spec, const StateSet& J) {
  const auto h = hops(spec);
  int d = 1 << 30;
  std::vector<char> in_J(spec.n_states(), 0);
  for (int j : J) {
    in_J[j] = 1;
    d = std::min(d, h[j]);
  }
  double lambda = 0;
  long long count = 0;
  walk(spec, in_J, spec.start, d, 1.0, lambda, count);
  return count;
}

std::vector<double> resetting_generator_moments(const NetworkSpec& spec, const StateSet& J,
                                                double r, int m) {
  const int n = spec.n_states();
  std::vector<char> in_J(n, 0);
  for (int j : J) in_J[j] = 1;
  if (in_J[spec.start]) return std::vector<double>(m, 0.0);
  // states reachable from the start before J (resets only lead back to it)
  std::vector<int> idx(n, -1), states;
  std::deque<int> q{spec.start};
  idx[spec.start] = 0;
  states.push_back(spec.start);
  while (!q.empty()) {
    int i = q.front();
    q.pop_front();
    for (int j = 0; j < n; ++j)
      if (j != i && idx[j] < 0 && !in_J[j] && spec.generator(i, j) > 0) {
        idx[j] = static_cast<int>(states.size());
        states.push_back(j);
        q.push_back(j);
      }
  }
  const int k = static_cast<int>(states.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    const int i = states[a];
    for (int j = 0; j < n; ++j)
      if (idx[j] >= 0) A(a, idx[j]) += spec.generator(i, j);
    if (i != spec.start) {
      A(a, 0) += r;
      A(a, a) -= r;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  std::vector<double> out;
  Eigen::VectorXd prev = Eigen::VectorXd::Ones(k);
  for (int order = 1; order <= m; ++order) {
    Eigen::VectorXd cur = lu.solve(-order * prev);
    out.push_back(cur(0));
    prev = cur;
  }
  return out;
}

}  // namespace testnet
