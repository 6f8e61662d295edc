#pragma once

#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gkpqec/autodiff.hpp"
#include "gkpqec/gates.hpp"
#include "gkpqec/lindblad.hpp"
#include "gkpqec/policy.hpp"
#include "gkpqec/propagator.hpp"
#include "gkpqec/schedule.hpp"

namespace gkpqec {

// kSuperop applies cached factored exp(L t) maps per idle segment (fast,
// needs a separable generator); kRk4 integrates the master equation directly
// and is the reference path.
enum class EvolutionMode { kRk4, kSuperop };
EvolutionMode evolution_mode_from_name(const std::string& name);

struct SbsOptions {
  Schedule schedule = Schedule::standard();
  double alpha_l4 = 0.0;  // layer-4 cavity displacement amplitude
  EvolutionMode mode = EvolutionMode::kSuperop;
  IntegratorConfig integrator{};
};

// Plain-arithmetic protocol engine. A half-cycle splits at the measurement:
//   pre_measurement: entering idle, 4 gate layers with their idles
//   (measurement/reset handled by the caller, instantaneous)
//   post_measurement: measurement-slot idle, frame rotation, final idle
class SbsEngine {
 public:
  SbsEngine(const HilbertConfig& hc, const NoiseModel& noise, const SbsOptions& opt,
            const HamiltonianParams& ham = {});

  MatrixXcd pre_measurement(MatrixXcd rho, const HalfCycleParams& p);
  MatrixXcd post_measurement(MatrixXcd rho, const HalfCycleParams& p);

  double ground_probability(const MatrixXcd& rho) const;
  // Projects the ancilla onto the outcome and resets it to ground; the result
  // keeps trace = outcome probability (no renormalization).
  MatrixXcd project_reset(const MatrixXcd& rho, int outcome) const;
  MatrixXcd unconditional_reset(const MatrixXcd& rho) const;

  MatrixXcd idle(MatrixXcd rho, double duration);

  bool measured() const { return opt_.schedule.measured; }
  const SbsOptions& options() const { return opt_; }
  const HilbertConfig& hilbert() const { return hc_; }
  const LindbladGenerator& generator() const { return gen_; }

 private:
  HilbertConfig hc_;
  SbsOptions opt_;
  LindbladGenerator gen_;
  std::optional<SegmentPropagator> prop_;  // superop mode only
};

struct TrajectoryStep {
  int outcome = -1;          // 0 ground, 1 excited, -1 no measurement
  double probability = 1.0;  // probability of the realized outcome
  std::array<double, 15> params{};
  double z_logical = std::numeric_limits<double>::quiet_NaN();
};

struct TrajectoryResult {
  MatrixXcd rho;
  std::vector<int> encodings;  // +1 ground / -1 excited, oldest first
  std::vector<TrajectoryStep> steps;
  double log_prob = 0.0;
};

struct TrajectoryOptions {
  int half_cycles = 2;
  // Empty string samples outcomes; otherwise characters 'g'/'e' force them
  // (length must be >= half_cycles on measured schedules).
  std::string forced;
  // Cavity-space operator whose joint expectation Re tr[(op (x) I) rho] is
  // recorded after every half-cycle (e.g. a logical Pauli); null skips it.
  const MatrixXcd* watch_cavity_op = nullptr;
};

// 'g'/'G'/'0' -> 0, 'e'/'E'/'1' -> 1; anything else is a ConfigError.
int outcome_from_char(char c);

TrajectoryResult run_trajectory(SbsEngine& eng, const FeedbackPolicy& policy,
                                MatrixXcd rho0, const TrajectoryOptions& opt,
                                std::mt19937& rng);

struct Branch {
  std::string outcomes;  // 'g'/'e' characters, oldest first
  double probability = 0.0;
  MatrixXcd rho;  // normalized
};

// Exact expansion of the outcome tree to the given depth, sharing prefix
// evolution. Branches with cumulative probability below prune_below are
// dropped (their weight is reported via the probability sum).
std::vector<Branch> enumerate_branches(SbsEngine& eng, const FeedbackPolicy& policy,
                                       const MatrixXcd& rho0, int half_cycles,
                                       double prune_below = 0.0);

// Differentiable mirror of SbsEngine on an autodiff tape. Idle segments use
// the factored propagator maps as tape constants, so the generator must be
// separable; gates are rebuilt from parameter nodes every half-cycle.
class TapedSbs {
 public:
  TapedSbs(ad::Tape& tape, const HilbertConfig& hc, const NoiseModel& noise,
           const SbsOptions& opt, const HamiltonianParams& ham = {});

  // Points the engine at a fresh tape. Cached segment exponentials survive, so
  // batched rollouts pay the propagator construction once.
  void rebind(ad::Tape& tape);

  ad::CVar lift(const MatrixXcd& rho0);
  ad::CVar pre_measurement(ad::CVar rho, const std::array<ad::Var, 15>& p);
  ad::CVar post_measurement(ad::CVar rho, const std::array<ad::Var, 15>& p);
  ad::Var outcome_probability(ad::CVar rho, int outcome);
  ad::CVar project_reset(ad::CVar rho, int outcome);  // unnormalized
  ad::CVar unconditional_reset(ad::CVar rho);
  ad::CVar idle(ad::CVar rho, double duration);

  ad::Tape& tape() { return *tape_; }
  bool measured() const { return opt_.schedule.measured; }

 private:
  ad::CVar taped_rotation_joint(ad::Var phi, ad::Var theta);
  ad::CVar taped_ecd(ad::Var beta_re, ad::Var beta_im);
  ad::CVar taped_vr_joint(ad::Var theta);

  ad::Tape* tape_;
  HilbertConfig hc_;
  SbsOptions opt_;
  LindbladGenerator gen_;
  SegmentPropagator prop_;
  int adag_minus_a_ = -1;  // tape constants reused by every ECD
  int adag_plus_a_ = -1;
  MatrixXcd layer4_unitary_;  // identity-skipped when alpha_l4 = 0
  bool has_layer4_ = false;
  std::map<double, std::pair<ad::CVar, ad::CVar>> segment_consts_;
};

}  // namespace gkpqec
