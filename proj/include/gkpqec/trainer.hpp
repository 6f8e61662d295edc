#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gkpqec/code.hpp"
#include "gkpqec/policy.hpp"
#include "gkpqec/sbs.hpp"

namespace gkpqec {

struct TrainConfig {
  int epochs = 1000;
  int batch_size = 6;       // 6 for the recurrent policy, 8 for fnn/lookup
  int train_cycles = 10;    // full cycles per episode; must be even so the
                            // deterministic per-cycle frame flip cancels
  double learning_rate = 1e-4;
  std::string noise_preset = "high";
  unsigned seed = 1234;
  int n_agents = 20;

  HilbertConfig hilbert{25};
  GkpStateSpec state{};     // training state is |+Z> of this code
  SbsOptions sbs{};

  double grad_clip = 0.0;   // global-norm clip, 0 disables
  double init_range = 0.1;
  double bias_init = 0.01;
  int lookup_depth = 4;     // half-cycles covered by the lookup table

  double divergence_factor = 10.0;
  int divergence_patience = 50;

  int postselect_cycles = 100;
  int postselect_batch = 6;
  unsigned postselect_seed = 777;

  void validate() const;
};

// Optimizer convergence tolerance quoted by the ordering checks.
inline constexpr double kTrainTolerance = 1e-3;

struct EpochStats {
  int epoch = 0;
  double infidelity = 0.0;     // 1 - mean batch reward
  double z_expectation = 0.0;  // mean final logical-Z of the batch
};

struct AgentResult {
  FeedbackPolicy policy;
  std::vector<EpochStats> curve;
  unsigned seed = 0;
  bool diverged = false;
  double postselect_lifetime = 0.0;  // cycles, from the fixed evaluation batch
};

struct TrainResult {
  std::vector<AgentResult> agents;
  int best_index = -1;  // -1 when every agent diverged
};

using TrainObserver =
    std::function<void(int agent, const EpochStats& stats)>;

// Adam ascent on the surrogate objective (it maximizes).
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);
  void step(std::vector<std::pair<std::string, MatrixXd>>& weights,
            const std::vector<MatrixXd>& ascent_grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<MatrixXd> m_, v_;
};

// One taped episode's differentiable outputs.
struct TapedEpisode {
  ad::Var reward;    // Re <target| rho_cavity |target> of the final state
  ad::Var log_prob;  // sum of log p_m over realized outcomes
  ad::CVar cavity;   // final cavity marginal
  std::vector<int> encodings;
};

// Runs a taped episode with per-half-cycle parameter nodes supplied directly
// (no policy); outcomes forced. Used by the gradient-correctness checks.
TapedEpisode run_taped_episode(TapedSbs& eng,
                               const std::vector<std::array<ad::Var, 15>>& params,
                               const MatrixXcd& rho0, const VectorXcd& target,
                               const std::string& forced);

// Policy-driven taped episode; outcomes sampled from the taped probabilities
// (or forced when the string is non-empty). The policy must have begun its
// taped episode on eng's tape (begin_taped).
TapedEpisode run_policy_episode(TapedSbs& eng, const FeedbackPolicy& policy,
                                const MatrixXcd& rho0, const VectorXcd& target,
                                int half_cycles, std::mt19937& rng,
                                const std::string& forced = "");

// Probability-weighted branch return Re <target| rho_tilde_b |target> for one
// forced branch, on unnormalized states (the branch weight rides the trace).
// Summed over all branches this is the exact expected return, fully on tape.
ad::Var branch_weighted_return(TapedSbs& eng, const FeedbackPolicy& policy,
                               const MatrixXcd& rho0, const VectorXcd& target,
                               const std::string& branch);

struct ExactTreeMetrics {
  double expected_return = 0.0;
  double expected_z = 0.0;
  double probability_mass = 0.0;
};

// Plain-arithmetic exact tree evaluation of a policy.
ExactTreeMetrics exact_tree_metrics(SbsEngine& eng, const FeedbackPolicy& policy,
                                    const MatrixXcd& rho0,
                                    const VectorXcd& target_cavity,
                                    const MatrixXcd& z_cavity, int half_cycles);

// Mean surrogate gradient over one sampled batch: fills ascent_grads (aligned
// with policy.weights()) and reports batch statistics. The engine is rebound
// to a fresh tape per batch element, so its cached maps are reused.
EpochStats sampled_batch_gradient(const TrainConfig& cfg, TapedSbs& eng,
                                  FeedbackPolicy& policy,
                                  const MatrixXcd& rho0, const VectorXcd& target,
                                  const MatrixXcd& z_cavity, int epoch,
                                  std::mt19937& rng,
                                  std::vector<MatrixXd>& ascent_grads);

// Exact-objective gradient (sum over all branches at the given depth).
double exact_tree_gradient(const TrainConfig& cfg, TapedSbs& eng,
                           FeedbackPolicy& policy, const MatrixXcd& rho0,
                           const VectorXcd& target, int half_cycles,
                           std::vector<MatrixXd>& ascent_grads);

// Multi-agent Feedback-GRAPE training with divergence guard and
// lifetime-based post-selection on a fixed-seed batch.
TrainResult train_policy(const TrainConfig& cfg, PolicyKind kind,
                         const TrainObserver& observer = {});

// Gradient ascent on the exact expected return over all outcome branches of
// the covered depth; the per-depth ceiling the trained policies are compared
// against.
FeedbackPolicy optimize_lookup(const TrainConfig& cfg, int half_cycles,
                               const TrainObserver& observer = {});

}  // namespace gkpqec
