#include "covertime/network.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "covertime/error.hpp"
#include "covertime/statistics.hpp"

namespace covertime {

namespace {

constexpr int kMaxUnknowns = 2000;
constexpr int kMaxSubsetBits = 20;
constexpr int kMaxMomentOrder = 4;
constexpr double kMaxExpandedStates = 1e6;

void require_rate(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    std::ostringstream os;
    os << "resetting rate must be finite and non-negative, got " << r;
    throw ValidationError(os.str());
  }
}

std::vector<char> membership(int n, const StateSet& set, const char* what) {
  if (set.empty()) throw ValidationError(std::string(what) + " must be non-empty");
  std::vector<char> in(n, 0);
  for (int s : set) {
    if (s < 0 || s >= n) {
      std::ostringstream os;
      os << what << " contains state " << s << " outside [0, " << n << ")";
      throw ValidationError(os.str());
    }
    in[s] = 1;
  }
  return in;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Renewal decomposition over reset cycles. Per cycle from state i:
//   a_n(i) = E[D^n; success], b_n(i) = E[D^n; reset first],
// both from the killed chain, and
//   M_n = (a_n + sum_{k>=1} C(n,k) b_k M_{n-k}) / P(success),
// all terms non-negative.
std::vector<double> renewal_moments(const KilledChain& kc, int start, double r, int up_to_m) {
  const int s = kc.local[start];
  const auto& solver = *kc.solver;
  const Eigen::VectorXd u = solver.solve(kc.into_target);
  const double p = u(s);
  if (!(p > 0.0)) throw NumericRefusal("target set is hit with probability zero");

  std::vector<Eigen::VectorXd> a{u};
  std::vector<Eigen::VectorXd> b;
  if (r > 0.0) b.push_back(solver.solve(Eigen::VectorXd::Constant(solver.size(), r)));
  for (int n = 1; n <= up_to_m; ++n) {
    a.push_back(solver.solve(n * a[n - 1]));
    if (r > 0.0) b.push_back(solver.solve(n * b[n - 1]));
  }

  std::vector<double> M(up_to_m + 1, 0.0);
  M[0] = 1.0;
  for (int n = 1; n <= up_to_m; ++n) {
    double acc = a[n](s);
    if (r > 0.0)
      for (int k = 1; k <= n; ++k) acc += binomial(n, k) * b[k](s) * M[n - k];
    M[n] = acc / p;
  }
  return {M.begin() + 1, M.end()};
}

int target_bits(const NetworkSpec& spec) {
  const int t = static_cast<int>(spec.targets.size());
  if (t > kMaxSubsetBits) {
    std::ostringstream os;
    os << "inclusion-exclusion over " << t << " targets exceeds the cap of 2^" << kMaxSubsetBits
       << " subsets; use Monte Carlo";
    throw NumericRefusal(os.str());
  }
  return t;
}

StateSet subset(const StateSet& items, std::uint32_t mask) {
  StateSet out;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (mask >> i & 1u) out.push_back(items[i]);
  return out;
}

double inclusion_sign(std::uint32_t mask) { return std::popcount(mask) % 2 == 1 ? 1.0 : -1.0; }

std::vector<double> node_lambdas(const NetworkSpec& spec, const GeodesicAnalysis& analysis,
                                 int max_distance) {
  const int n = spec.n_states();
  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (analysis.h[i] >= 0 && analysis.h[i] <= max_distance) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return analysis.h[x] < analysis.h[y]; });
  std::vector<double> w(n, 0.0);
  w[spec.start] = 1.0;
  for (int i : order) {
    if (analysis.h[i] == max_distance) continue;
    for (int j = 0; j < n; ++j)
      if (j != i && analysis.h[j] == analysis.h[i] + 1 && spec.generator(i, j) > 0.0)
        w[j] += w[i] * spec.generator(i, j);
  }
  return w;
}

struct SubsetStats {
  std::vector<double> mu1, mu2, mu3;
  std::vector<double> sign;
};

SubsetStats all_subset_tau0(const NetworkSpec& spec) {
  const int t = target_bits(spec);
  SubsetStats s;
  for (std::uint32_t mask = 1; mask < (1u << t); ++mask) {
    const auto m = mfpt_moments_with_reset(spec, subset(spec.targets, mask), 0.0, 3);
    s.mu1.push_back(m[0]);
    s.mu2.push_back(m[1]);
    s.mu3.push_back(m[2]);
    s.sign.push_back(inclusion_sign(mask));
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

KilledChainSolver::KilledChainSolver(Eigen::MatrixXd rates, Eigen::VectorXd kill)
    : lu_(std::move(rates)), pivot_(kill.size()) {
  const Eigen::Index n = lu_.rows();
  if (lu_.cols() != n || kill.size() != n)
    throw ValidationError("killed-chain solver: dimension mismatch");
  for (Eigen::Index k = 0; k < n; ++k) {
    double d = kill(k);
    for (Eigen::Index j = k + 1; j < n; ++j) d += lu_(k, j);
    if (!(d > 0.0))
      throw NumericRefusal("killed chain has a closed class (singular system)");
    pivot_(k) = d;
    for (Eigen::Index i = k + 1; i < n; ++i) lu_(i, k) /= d;
    for (Eigen::Index j = k + 1; j < n; ++j) {
      const double w = lu_(k, j);
      if (w == 0.0) continue;
      for (Eigen::Index i = k + 1; i < n; ++i)
        if (i != j) lu_(i, j) += lu_(i, k) * w;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) kill(i) += lu_(i, k) * kill(k);
  }
}

Eigen::VectorXd KilledChainSolver::solve(Eigen::VectorXd b) const {
  const Eigen::Index n = pivot_.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double bk = b(k);
    if (bk == 0.0) continue;
    for (Eigen::Index i = k + 1; i < n; ++i) b(i) += lu_(i, k) * bk;
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    double acc = b(k);
    for (Eigen::Index j = k + 1; j < n; ++j) acc += lu_(k, j) * b(j);
    b(k) = acc / pivot_(k);
  }
  return b;
}

KilledChain build_killed_chain(const NetworkSpec& spec, const std::vector<char>& in_J, double r,
                               bool prune_traps) {
  const int n = spec.n_states();
  const auto& Q = spec.generator;
  KilledChain kc;
  kc.local.assign(n, -1);

  std::vector<char> seen(n, 0);
  std::deque<int> queue{spec.start};
  seen[spec.start] = 1;
  std::vector<int> reached;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    reached.push_back(i);
    for (int j = 0; j < n; ++j) {
      if (j == i || seen[j] || Q(i, j) <= 0.0 || in_J[j]) continue;
      seen[j] = 1;
      queue.push_back(j);
    }
  }

  // which of them can reach J
  std::vector<char> good(n, 0);
  for (int i : reached)
    for (int j = 0; j < n; ++j)
      if (in_J[j] && Q(i, j) > 0.0) good[i] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (int i : reached) {
      if (good[i]) continue;
      for (int j : reached)
        if (good[j] && Q(i, j) > 0.0) {
          good[i] = 1;
          changed = true;
          break;
        }
    }
  }
  for (int i : reached) {
    if (!good[i]) {
      kc.has_trap = true;
      if (prune_traps) continue;
    }
    kc.local[i] = static_cast<int>(kc.interior.size());
    kc.interior.push_back(i);
  }
  if (kc.has_trap && !prune_traps && r == 0.0)
    throw NumericRefusal("hitting time without resetting has infinite moments (trap states)");
  const int m = static_cast<int>(kc.interior.size());
  if (m > kMaxUnknowns) {
    std::ostringstream os;
    os << "linear system with " << m << " unknowns exceeds the cap of " << kMaxUnknowns
       << "; use Monte Carlo";
    throw NumericRefusal(os.str());
  }

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd kill = Eigen::VectorXd::Constant(m, r);
  kc.into_target = Eigen::VectorXd::Zero(m);
  for (int a = 0; a < m; ++a) {
    const int i = kc.interior[a];
    for (int j = 0; j < n; ++j) {
      if (j == i || Q(i, j) <= 0.0) continue;
      if (kc.local[j] >= 0) {
        W(a, kc.local[j]) = Q(i, j);
      } else {
        kill(a) += Q(i, j);
        if (in_J[j]) kc.into_target(a) += Q(i, j);
      }
    }
  }
  if (m > 0) kc.solver.emplace(std::move(W), std::move(kill));
  return kc;
}

// ---------------------------------------------------------------------------

std::string NetworkSpec::label(int state) const {
  if (state >= 0 && state < static_cast<int>(labels.size())) return labels[state];
  return std::to_string(state);
}

GeodesicAnalysis validate_network(const NetworkSpec& spec) {
  const auto& Q = spec.generator;
  const int n = spec.n_states();
  if (n == 0 || Q.cols() != n) throw ValidationError("generator must be a non-empty square matrix");
  if (!Q.allFinite()) throw ValidationError("generator has non-finite entries");
  if (!spec.labels.empty() && static_cast<int>(spec.labels.size()) != n)
    throw ValidationError("number of labels does not match the number of states");

  double max_rate = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      max_rate = std::max(max_rate, std::abs(Q(i, j)));
      if (i != j && Q(i, j) < 0.0) {
        std::ostringstream os;
        os << "negative rate " << Q(i, j) << " from " << spec.label(i) << " to " << spec.label(j);
        throw ValidationError(os.str());
      }
    }
  for (int i = 0; i < n; ++i) {
    CompensatedSum row;
    for (int j = 0; j < n; ++j) row.add(Q(i, j));
    if (std::abs(row.value()) > 1e-12 * max_rate) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << spec.label(i) << " of the generator sums to " << row.value()
         << ", not 0";
      throw ValidationError(os.str());
    }
  }
  if (spec.start < 0 || spec.start >= n) throw ValidationError("start state out of range");
  if (spec.targets.empty()) throw ValidationError("target set is empty");
  std::vector<char> is_target(n, 0);
  for (int t : spec.targets) {
    if (t < 0 || t >= n) throw ValidationError("target state out of range");
    if (is_target[t]) throw ValidationError("duplicate target " + spec.label(t));
    is_target[t] = 1;
  }

  GeodesicAnalysis g;
  g.h.assign(n, -1);
  g.h[spec.start] = 0;
  std::deque<int> queue{spec.start};
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    for (int j = 0; j < n; ++j)
      if (j != i && g.h[j] < 0 && Q(i, j) > 0.0) {
        g.h[j] = g.h[i] + 1;
        queue.push_back(j);
      }
  }
  for (int t : spec.targets) {
    if (g.h[t] < 0) throw ValidationError("target " + spec.label(t) + " is unreachable from the start");
    g.h_star = std::max(g.h_star, g.h[t]);
  }
  for (int t : spec.targets)
    if (g.h[t] == g.h_star) g.far_set.push_back(t);
  return g;
}

LambdaValue lambda_of_set(const NetworkSpec& spec, const GeodesicAnalysis& analysis,
                          const StateSet& J) {
  membership(spec.n_states(), J, "state set");
  LambdaValue out;
  out.distance = std::numeric_limits<int>::max();
  for (int j : J) {
    if (analysis.h[j] < 0) throw ValidationError("state " + spec.label(j) + " is unreachable");
    out.distance = std::min(out.distance, analysis.h[j]);
  }
  const auto w = node_lambdas(spec, analysis, out.distance);
  std::vector<char> counted(spec.n_states(), 0);
  for (int j : J)
    if (analysis.h[j] == out.distance && !counted[j]) {
      counted[j] = 1;
      out.lambda += w[j];
    }
  return out;
}

double theorem2_constant(const NetworkSpec& spec, const GeodesicAnalysis& analysis, int m) {
  if (m < 1) throw ValidationError("moment order must be >= 1");
  const auto& far = analysis.far_set;
  if (far.size() > static_cast<std::size_t>(kMaxSubsetBits))
    throw NumericRefusal("far set too large for inclusion-exclusion (more than 20 nodes)");
  const auto w = node_lambdas(spec, analysis, analysis.h_star);
  CompensatedSum K;
  for (std::uint32_t mask = 1; mask < (1u << far.size()); ++mask) {
    double lambda = 0.0;
    for (std::size_t i = 0; i < far.size(); ++i)
      if (mask >> i & 1u) lambda += w[far[i]];
    K.add(inclusion_sign(mask) * std::pow(lambda, -m));
  }
  return K.value();
}

double theorem2_moment(const NetworkSpec& spec, const GeodesicAnalysis& analysis, int m,
                       double r) {
  if (!(r > 0.0)) throw ValidationError("resetting rate must be positive");
  const double K = theorem2_constant(spec, analysis, m);
  return std::exp(std::lgamma(m + 1.0) + std::log(K) -
                  m * (1.0 - analysis.h_star) * std::log(r));
}

double hitting_prob_exact(const NetworkSpec& spec, const StateSet& omega, double r) {
  validate_network(spec);
  require_rate(r);
  const auto in = membership(spec.n_states(), omega, "state set");
  if (in[spec.start]) return 1.0;
  const KilledChain kc = build_killed_chain(spec, in, r, true);
  if (kc.local[spec.start] < 0) return 0.0;
  return kc.solver->solve(kc.into_target)(kc.local[spec.start]);
}

std::vector<double> mfpt_moments_with_reset(const NetworkSpec& spec, const StateSet& J, double r,
                                            int up_to_m) {
  validate_network(spec);
  require_rate(r);
  if (up_to_m < 1 || up_to_m > kMaxMomentOrder)
    throw ValidationError("moment order must be between 1 and 4");
  const auto in = membership(spec.n_states(), J, "state set");
  if (in[spec.start]) return std::vector<double>(up_to_m, 0.0);
  const KilledChain kc = build_killed_chain(spec, in, r, false);
  return renewal_moments(kc, spec.start, r, up_to_m);
}

std::vector<double> mct_exact_moments(const NetworkSpec& spec, double r, int up_to_m) {
  validate_network(spec);
  const int t = target_bits(spec);
  std::vector<CompensatedSum> sums(up_to_m);
  for (std::uint32_t mask = 1; mask < (1u << t); ++mask) {
    const auto m = mfpt_moments_with_reset(spec, subset(spec.targets, mask), r, up_to_m);
    const double sign = inclusion_sign(mask);
    for (int k = 0; k < up_to_m; ++k) sums[k].add(sign * m[k]);
  }
  std::vector<double> out;
  for (const auto& s : sums) out.push_back(s.value());
  return out;
}

double covering_chain_mct(const NetworkSpec& spec, double r) {
  validate_network(spec);
  require_rate(r);
  const int n = spec.n_states();
  const int t = static_cast<int>(spec.targets.size());
  if (t > kMaxSubsetBits || static_cast<double>(n) * std::ldexp(1.0, t) > kMaxExpandedStates)
    throw NumericRefusal("covering chain would exceed 10^6 states");
  const auto& Q = spec.generator;
  std::vector<std::uint32_t> bit(n, 0);
  for (int k = 0; k < t; ++k) bit[spec.targets[k]] = 1u << k;
  const std::uint32_t full = (1u << t) - 1u;
  const std::uint32_t start_mask = bit[spec.start];
  if (start_mask == full) return 0.0;

  auto key = [&](int i, std::uint32_t mask) { return static_cast<std::size_t>(mask) * n + i; };
  std::vector<int> index(static_cast<std::size_t>(n) << t, -1);
  std::vector<std::pair<int, std::uint32_t>> states;
  std::vector<std::vector<std::pair<int, double>>> out_edges;  // -1 = absorbed

  auto visit = [&](int i, std::uint32_t mask) {
    if (mask == full) return -1;
    auto& slot = index[key(i, mask)];
    if (slot < 0) {
      slot = static_cast<int>(states.size());
      states.emplace_back(i, mask);
    }
    return slot;
  };
  visit(spec.start, start_mask);
  for (std::size_t x = 0; x < states.size(); ++x) {
    const auto [i, mask] = states[x];
    std::vector<std::pair<int, double>> edges;
    for (int j = 0; j < n; ++j)
      if (j != i && Q(i, j) > 0.0) edges.emplace_back(visit(j, mask | bit[j]), Q(i, j));
    if (r > 0.0 && i != spec.start) edges.emplace_back(visit(spec.start, mask), r);
    out_edges.push_back(std::move(edges));
  }

  // every expanded state must be able to reach absorption
  const int m = static_cast<int>(states.size());
  std::vector<std::vector<int>> preds(m);
  std::vector<char> ok(m, 0);
  std::deque<int> queue;
  for (int x = 0; x < m; ++x)
    for (const auto& [y, rate] : out_edges[x]) {
      if (y < 0) {
        if (!ok[x]) queue.push_back(x);
        ok[x] = 1;
      } else {
        preds[y].push_back(x);
      }
    }
  while (!queue.empty()) {
    const int y = queue.front();
    queue.pop_front();
    for (int x : preds[y])
      if (!ok[x]) {
        ok[x] = 1;
        queue.push_back(x);
      }
  }
  if (std::find(ok.begin(), ok.end(), 0) != ok.end())
    throw NumericRefusal("cover time is infinite with positive probability");

  std::vector<Eigen::Triplet<double>> trip;
  for (int x = 0; x < m; ++x) {
    double total = 0.0;
    for (const auto& [y, rate] : out_edges[x]) {
      total += rate;
      if (y >= 0) trip.emplace_back(x, y, rate);
    }
    trip.emplace_back(x, x, -total);
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericRefusal("covering-chain factorisation failed");
  const Eigen::VectorXd sol = lu.solve(Eigen::VectorXd::Constant(m, -1.0));
  if (lu.info() != Eigen::Success || !sol.allFinite())
    throw NumericRefusal("covering-chain solve failed");
  return sol(0);
}

Tau0Stats tau0_moment_stats(const NetworkSpec& spec, const StateSet& J) {
  const auto m = mfpt_moments_with_reset(spec, J, 0.0, 3);
  return {m[0], m[1] - m[0] * m[0], m[2]};
}

BenefitCriterion reset_benefit_criterion(const NetworkSpec& spec) {
  validate_network(spec);
  const auto s = all_subset_tau0(spec);
  CompensatedSum value, scale;
  for (std::size_t k = 0; k < s.mu1.size(); ++k) {
    value.add(s.sign[k] * (2.0 * s.mu1[k] * s.mu1[k] - s.mu2[k]));
    scale.add(s.mu1[k] * s.mu1[k]);
  }
  BenefitCriterion c;
  c.value = value.value();
  c.scale = scale.value();
  c.beneficial = c.value < -64.0 * std::numeric_limits<double>::epsilon() * c.scale;
  return c;
}

SmallRExpansion small_r_mct_expansion(const NetworkSpec& spec, SecondOrderForm form) {
  validate_network(spec);
  const auto s = all_subset_tau0(spec);
  CompensatedSum c0, c1, c2;
  for (std::size_t k = 0; k < s.mu1.size(); ++k) {
    const double mu1 = s.mu1[k];
    const double phi = 2.0 * mu1 * mu1 - s.mu2[k];
    const double second = form == SecondOrderForm::Corrected
                              ? s.mu3[k] / 3.0 + 2.0 * phi * mu1 - 2.0 * mu1 * mu1 * mu1
                              : s.mu3[k] / 3.0 + phi * mu1;
    c0.add(s.sign[k] * mu1);
    c1.add(s.sign[k] * phi / 2.0);
    c2.add(s.sign[k] * second / 2.0);
  }
  return {c0.value(), c1.value(), c2.value()};
}

double network_ropt_estimate(const NetworkSpec& spec, SecondOrderForm form) {
  const auto criterion = reset_benefit_criterion(spec);
  if (!criterion.beneficial) {
    std::ostringstream os;
    os.precision(6);
    os << "resetting does not reduce the mean cover time at small r (criterion value "
       << criterion.value << " >= 0); no optimal rate estimate";
    throw NumericRefusal(os.str());
  }
  const auto e = small_r_mct_expansion(spec, form);
  if (!(e.quadratic > 0.0)) {
    std::ostringstream os;
    os << "small-r expansion is not convex at 0 (quadratic coefficient " << e.quadratic << ")";
    throw NumericRefusal(os.str());
  }
  return -e.linear / (2.0 * e.quadratic);
}

LatticePStar lattice_p_star(int g, int ell, double k, double r) {
  if (g < 1 || ell < 1) throw ValidationError("lattice needs g >= 1 and l >= 1");
  if (!(k > 0.0) || !(r > 0.0)) throw ValidationError("lattice rates must be positive");
  const double gl = static_cast<double>(g) * ell;
  LatticePStar p;
  p.exact = std::exp(g * std::numbers::ln2 + std::lgamma(gl + 1.0) - g * std::lgamma(ell + 1.0) +
                     gl * std::log(k / r));
  p.stirling = std::exp(0.5 * std::log(2.0 * std::numbers::pi * gl) +
                        0.5 * g * std::log(2.0 / (std::numbers::pi * ell)) +
                        gl * std::log(g * k / r));
  p.simplified = g == 2 ? std::exp((1.0 + ell) * std::log(4.0) -
                                   0.5 * std::log(std::numbers::pi * ell) +
                                   2.0 * ell * std::log(k / r))
                        : std::numeric_limits<double>::quiet_NaN();
  return p;
}

}  // namespace covertime
