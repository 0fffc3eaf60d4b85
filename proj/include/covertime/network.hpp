#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

// Cover times of a target node set by a continuous-time Markov chain that is
// reset to its start node at exponential times with rate r.

namespace covertime {

using StateSet = std::vector<int>;

struct NetworkSpec {
  /// Generator Q: q(i, j) >= 0 off the diagonal, zero row sums.
  Eigen::MatrixXd generator;
  int start = 0;
  StateSet targets;
  /// Optional state names; empty means "0", "1", ...
  std::vector<std::string> labels;

  int n_states() const { return static_cast<int>(generator.rows()); }
  std::string label(int state) const;
};

struct GeodesicAnalysis {
  /// Hop distance from the start on the support graph; -1 if unreachable.
  std::vector<int> h;
  int h_star = 0;
  StateSet far_set;
};

/// Checks the generator and targets and computes hop distances.
/// Throws ValidationError with a distinct message for: non-square or
/// non-finite Q, negative off-diagonal rate, non-zero row sum (tolerance
/// 1e-12 max|q|), bad start, empty/out-of-range/duplicate targets, and
/// unreachable targets.
GeodesicAnalysis validate_network(const NetworkSpec& spec);

struct LambdaValue {
  int distance = 0;   // h(i0, J)
  double lambda = 0;  // sum of rate products over shortest paths into J
};

/// Forward dynamic programme over the BFS layers; no path enumeration.
LambdaValue lambda_of_set(const NetworkSpec& spec, const GeodesicAnalysis& analysis,
                          const StateSet& J);

/// K_m = sum over non-empty J in the far set of (-1)^(|J|-1) Lambda(J)^-m.
double theorem2_constant(const NetworkSpec& spec, const GeodesicAnalysis& analysis, int m);

/// Frequent-resetting asymptote m! K_m / r^(m (1 - h*)) of E[T_r^m].
double theorem2_moment(const NetworkSpec& spec, const GeodesicAnalysis& analysis, int m,
                       double r);

/// P(the chain started at i0 hits omega before an Exp(r) clock rings).
double hitting_prob_exact(const NetworkSpec& spec, const StateSet& omega, double r);

/// E[tau_r(J)^n], n = 1..up_to_m (<= 4), with resetting to the start at rate r.
/// r = 0 is allowed when J is reachable from every state the chain can visit
/// before hitting J; otherwise the moments are infinite and NumericRefusal is
/// thrown.
std::vector<double> mfpt_moments_with_reset(const NetworkSpec& spec, const StateSet& J,
                                            double r, int up_to_m);

/// E[T_r^n], n = 1..up_to_m, by inclusion-exclusion over subsets of the
/// targets (at most 20 targets).
std::vector<double> mct_exact_moments(const NetworkSpec& spec, double r, int up_to_m);

/// Mean cover time from the chain on (state, visited targets), solved as
/// one sparse linear system. Refuses beyond 10^6 expanded states.
double covering_chain_mct(const NetworkSpec& spec, double r);

struct Tau0Stats {
  double mean = 0;
  double variance = 0;
  double third_moment = 0;
};

/// Moments of the hitting time of J without resetting.
Tau0Stats tau0_moment_stats(const NetworkSpec& spec, const StateSet& J);

struct BenefitCriterion {
  /// Alternating sum of Phi(J) = E[tau_0(J)]^2 - Var(tau_0(J)).
  double value = 0;
  /// Alternating-sum magnitude scale, sum of E[tau_0(J)]^2 over all J.
  double scale = 0;
  /// value < 0 beyond rounding (a few ulps of scale).
  bool beneficial = false;
};

BenefitCriterion reset_benefit_criterion(const NetworkSpec& spec);

/// Second-order coefficient of the small-r expansion. Corrected is the exact
/// Taylor coefficient, (r^2/2) sum (mu3/3 + 2 Phi mu1 - 2 mu1^3); Published
/// is (r^2/2) sum (mu3/3 + Phi mu1), which does not vanish for an
/// exponential hitting time and overstates curvature in general.
enum class SecondOrderForm { Corrected, Published };

struct SmallRExpansion {
  double mct0 = 0;       // E[T_0]
  double linear = 0;     // coefficient of r
  double quadratic = 0;  // coefficient of r^2
  double operator()(double r) const { return mct0 + r * (linear + r * quadratic); }
};

SmallRExpansion small_r_mct_expansion(const NetworkSpec& spec,
                                      SecondOrderForm form = SecondOrderForm::Corrected);

/// Vertex -linear / (2 quadratic) of the small-r expansion. Refuses when
/// resetting is not beneficial or the quadratic coefficient is not positive.
double network_ropt_estimate(const NetworkSpec& spec,
                             SecondOrderForm form = SecondOrderForm::Corrected);

struct LatticePStar {
  double exact = 0;       // 2^g (g l)! / (l!)^g (k / r)^(g l)
  double stirling = 0;    // sqrt(2 pi g l) (2 / (pi l))^(g/2) (g k / r)^(g l)
  double simplified = 0;  // g = 2 only: 4^(1+l) / sqrt(pi l) (k / r)^(2l); NaN otherwise
};

/// Success probability of the antipode of a g-dimensional periodic lattice
/// with 2l sites per side and hop rate k.
LatticePStar lattice_p_star(int g, int ell, double k, double r);

// ---------------------------------------------------------------------------

/// Linear solver for killed sub-generators: (diag(kill + W 1) - W) x = b with
/// W >= 0 off the diagonal and b >= 0. Elimination keeps every operation a
/// sum of non-negative terms (Grassmann-Taksar-Heyman), so tiny components of
/// x (success probabilities ~ r^-h) keep full relative accuracy.
class KilledChainSolver {
 public:
  KilledChainSolver(Eigen::MatrixXd rates, Eigen::VectorXd kill);
  Eigen::VectorXd solve(Eigen::VectorXd b) const;
  int size() const { return static_cast<int>(pivot_.size()); }

 private:
  Eigen::MatrixXd lu_;
  Eigen::VectorXd pivot_;
};

/// The chain killed on hitting J (success) or at rate r (reset), restricted
/// to the states reachable from the start before J ("interior" states).
struct KilledChain {
  std::vector<int> interior;   // local -> state
  std::vector<int> local;      // state -> local index, or -1
  Eigen::VectorXd into_target; // q(i, J) per interior state
  std::optional<KilledChainSolver> solver;
  bool has_trap = false;       // some interior state cannot reach J
};

/// in_J is a 0/1 mask over states. With prune_traps, interior states that
/// cannot reach J are dropped (jumps into them count as killing). Refuses
/// beyond 2000 interior states, and when r = 0 leaves unpruned traps.
KilledChain build_killed_chain(const NetworkSpec& spec, const std::vector<char>& in_J, double r,
                               bool prune_traps);

}  // namespace covertime
