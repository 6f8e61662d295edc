#pragma once

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gkpqec/autodiff.hpp"
#include "gkpqec/gates.hpp"
#include "gkpqec/types.hpp"

namespace gkpqec {

enum class PolicyKind { kStatic, kLookup, kFnn, kGru };

PolicyKind policy_kind_from_name(const std::string& name);
std::string policy_kind_name(PolicyKind kind);

// Feedback controller queried before every half-cycle. Queries are stateless:
// the caller passes the full outcome history (+1 ground, -1 excited, oldest
// first), and recurrent policies replay it from a start token of 0. The
// output is the 15 gate parameters, produced as bounded corrections added to
// the standard values: tanh outputs scaled by 2 for the first 14 parameters
// and by 1 for the frame-rotation angle.
//
// kStatic ignores the history and always returns the standard parameters.
// kLookup indexes a table by the history (most recent outcomes at the deepest
//   level once the episode outgrows the table depth).
// kFnn sees only the latest outcome. kGru carries a 10-unit recurrent state
//   across the replayed sequence.
class FeedbackPolicy {
 public:
  FeedbackPolicy() = default;  // equivalent to make_static()

  static FeedbackPolicy make_static();
  static FeedbackPolicy make_lookup(int depth_half_cycles, std::mt19937& rng,
                                    double init_range = 0.0);
  static FeedbackPolicy make_fnn(std::mt19937& rng, double init_range = 0.1,
                                 double bias_init = 0.01);
  static FeedbackPolicy make_gru(std::mt19937& rng, double init_range = 0.1,
                                 double bias_init = 0.01);

  PolicyKind kind() const { return kind_; }
  bool trainable() const { return kind_ != PolicyKind::kStatic; }
  int lookup_depth() const { return depth_; }

  HalfCycleParams query(const std::vector<int>& outcomes) const;

  // begin_taped pushes every weight matrix onto the tape as a parameter node;
  // query_taped then mirrors query() with Var arithmetic, returning the 15
  // final gate parameters as scalar nodes.
  void begin_taped(ad::Tape& tape);
  std::array<ad::Var, 15> query_taped(const std::vector<int>& outcomes) const;

  std::vector<std::pair<std::string, MatrixXd>>& weights() { return weights_; }
  const std::vector<std::pair<std::string, MatrixXd>>& weights() const {
    return weights_;
  }
  const std::vector<int>& taped_param_ids() const { return taped_ids_; }

  nlohmann::json to_json() const;
  static FeedbackPolicy from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static FeedbackPolicy load(const std::string& path);

  static std::array<double, 15> output_scale();

 private:
  const MatrixXd& weight(const std::string& name) const;
  int lookup_node(const std::vector<int>& outcomes) const;

  PolicyKind kind_ = PolicyKind::kStatic;
  int depth_ = 0;  // lookup only, in half-cycles
  std::vector<std::pair<std::string, MatrixXd>> weights_;

  ad::Tape* tape_ = nullptr;
  std::vector<int> taped_ids_;
};

}  // namespace gkpqec
