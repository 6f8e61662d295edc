#include "gkpqec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gkpqec/evaluation.hpp"
#include "gkpqec/fock.hpp"

namespace gkpqec {

namespace {

ad::CVar cavity_marginal(ad::CVar rho) {
  return ad::cadd(ad::cqubit_block(rho, 0, 0), ad::cqubit_block(rho, 1, 1));
}

struct Problem {
  NoiseModel noise;
  VectorXcd psi;    // cavity target = initial logical state
  MatrixXcd rho0;   // joint initial state, qubit in |g>
  MatrixXcd z_cav;  // logical Z on the cavity
};

Problem make_problem(const TrainConfig& cfg) {
  Problem p;
  p.noise = NoiseModel::from_name(cfg.noise_preset);
  p.psi = logical_state(LogicalLabel::plus_z, cfg.state, cfg.hilbert);
  MatrixXcd qubit_g = MatrixXcd::Zero(2, 2);
  qubit_g(0, 0) = 1.0;
  p.rho0 = kron(MatrixXcd(p.psi * p.psi.adjoint()), qubit_g);
  p.z_cav = pauli_operator('Z', cfg.state.lattice, cfg.hilbert.n_fock);
  return p;
}

FeedbackPolicy make_fresh_policy(PolicyKind kind, const TrainConfig& cfg,
                                 std::mt19937& rng) {
  switch (kind) {
    case PolicyKind::kLookup:
      // zero table = exactly the standard protocol as the starting point
      return FeedbackPolicy::make_lookup(cfg.lookup_depth, rng, 0.0);
    case PolicyKind::kFnn:
      return FeedbackPolicy::make_fnn(rng, cfg.init_range, cfg.bias_init);
    case PolicyKind::kGru:
      return FeedbackPolicy::make_gru(rng, cfg.init_range, cfg.bias_init);
    default:
      throw ConfigError("the static baseline has no trainable weights");
  }
}

void zero_like(const std::vector<std::pair<std::string, MatrixXd>>& weights,
               std::vector<MatrixXd>& grads) {
  grads.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    grads[i] = MatrixXd::Zero(weights[i].second.rows(), weights[i].second.cols());
}

void accumulate_param_grads(const ad::Tape& tape, const std::vector<int>& ids,
                            double scale, std::vector<MatrixXd>& grads) {
  if (ids.size() != grads.size())
    throw NumericalError("taped parameter count does not match the weight list");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const MatrixXd& g = tape.grad(ids[i]);
    if (g.size()) grads[i] += scale * g;
  }
}

double postselect_lifetime(const TrainConfig& cfg, const Problem& prob,
                           SbsEngine& eng, const FeedbackPolicy& policy) {
  LifetimeOptions lo;
  lo.cycles = cfg.postselect_cycles;
  lo.batch = cfg.postselect_batch;
  lo.seed = cfg.postselect_seed;
  lo.axis = 'Z';
  return logical_lifetime(eng, policy, prob.rho0, prob.z_cav, lo).fit.tau;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (train_cycles < 2 || train_cycles % 2 != 0)
    throw ConfigError(
        "train_cycles must be even: the deterministic per-cycle frame flip "
        "only cancels over pairs of cycles");
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (n_agents < 1) throw ConfigError("n_agents must be positive");
  if (grad_clip < 0.0) throw ConfigError("grad_clip cannot be negative");
  if (init_range < 0.0) throw ConfigError("init_range cannot be negative");
  if (lookup_depth < 1 || lookup_depth > 20)
    throw ConfigError("lookup depth must lie in [1, 20]");
  if (divergence_factor <= 1.0)
    throw ConfigError("divergence factor must exceed 1");
  if (divergence_patience < 1)
    throw ConfigError("divergence patience must be positive");
  if (postselect_cycles < 2)
    throw ConfigError("postselect_cycles must be at least 2");
  if (postselect_batch < 1)
    throw ConfigError("postselect batch must be positive");
  hilbert.validate();
  state.validate();
  sbs.schedule.validate();
  NoiseModel::from_name(noise_preset);
  if (!sbs.schedule.measured)
    throw ConfigError("training requires a measured schedule");
}

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::step(std::vector<std::pair<std::string, MatrixXd>>& weights,
                         const std::vector<MatrixXd>& ascent_grads) {
  if (ascent_grads.size() != weights.size())
    throw NumericalError("gradient list does not match the weight list");
  if (m_.empty()) {
    m_.resize(weights.size());
    v_.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      m_[i] = MatrixXd::Zero(weights[i].second.rows(), weights[i].second.cols());
      v_[i] = m_[i];
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, double(t_));
  const double c2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    MatrixXd& w = weights[i].second;
    const MatrixXd& g = ascent_grads[i];
    if (g.rows() != w.rows() || g.cols() != w.cols())
      throw NumericalError("gradient shape mismatch for " + weights[i].first);
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    w.array() += lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

TapedEpisode run_taped_episode(TapedSbs& eng,
                               const std::vector<std::array<ad::Var, 15>>& params,
                               const MatrixXcd& rho0, const VectorXcd& target,
                               const std::string& forced) {
  ad::Tape& t = eng.tape();
  if (eng.measured() && forced.size() < params.size())
    throw ConfigError("forced outcome string is shorter than the episode");
  TapedEpisode ep;
  ad::CVar rho = eng.lift(rho0);
  ad::Var logp = ad::scalar(t, 0.0);
  for (std::size_t h = 0; h < params.size(); ++h) {
    rho = eng.pre_measurement(rho, params[h]);
    if (eng.measured()) {
      const int m = outcome_from_char(forced[h]);
      ad::Var pm = eng.outcome_probability(rho, m);
      if (pm.value()(0, 0) < 1e-12)
        throw NumericalError("forced outcome has vanishing probability");
      rho = ad::cscalar_div(eng.project_reset(rho, m), pm);
      logp = logp + ad::log(pm);
      ep.encodings.push_back(m == 0 ? 1 : -1);
    }
    rho = eng.post_measurement(rho, params[h]);
  }
  ep.cavity = cavity_marginal(rho);
  ep.reward = ad::pure_state_overlap(target, ep.cavity);
  ep.log_prob = logp;
  return ep;
}

TapedEpisode run_policy_episode(TapedSbs& eng, const FeedbackPolicy& policy,
                                const MatrixXcd& rho0, const VectorXcd& target,
                                int half_cycles, std::mt19937& rng,
                                const std::string& forced) {
  if (half_cycles < 1) throw ConfigError("episode needs at least one half-cycle");
  if (eng.measured() && !forced.empty() && int(forced.size()) < half_cycles)
    throw ConfigError("forced outcome string is shorter than the episode");
  ad::Tape& t = eng.tape();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  TapedEpisode ep;
  ad::CVar rho = eng.lift(rho0);
  ad::Var logp = ad::scalar(t, 0.0);
  for (int h = 0; h < half_cycles; ++h) {
    const std::array<ad::Var, 15> par = policy.query_taped(ep.encodings);
    rho = eng.pre_measurement(rho, par);
    if (eng.measured()) {
      ad::Var pg = eng.outcome_probability(rho, 0);
      int m;
      if (!forced.empty())
        m = outcome_from_char(forced[std::size_t(h)]);
      else
        m = u01(rng) < pg.value()(0, 0) ? 0 : 1;
      ad::Var pm = m == 0 ? pg : eng.outcome_probability(rho, 1);
      if (pm.value()(0, 0) < 1e-12)
        throw NumericalError("realized outcome has vanishing probability");
      rho = ad::cscalar_div(eng.project_reset(rho, m), pm);
      logp = logp + ad::log(pm);
      ep.encodings.push_back(m == 0 ? 1 : -1);
    }
    rho = eng.post_measurement(rho, par);
  }
  ep.cavity = cavity_marginal(rho);
  ep.reward = ad::pure_state_overlap(target, ep.cavity);
  ep.log_prob = logp;
  return ep;
}

ad::Var branch_weighted_return(TapedSbs& eng, const FeedbackPolicy& policy,
                               const MatrixXcd& rho0, const VectorXcd& target,
                               const std::string& branch) {
  if (!eng.measured())
    throw ConfigError("branch enumeration needs a measured schedule");
  ad::CVar rho = eng.lift(rho0);
  std::vector<int> encodings;
  for (char c : branch) {
    const int m = outcome_from_char(c);
    const std::array<ad::Var, 15> par = policy.query_taped(encodings);
    rho = eng.pre_measurement(rho, par);
    rho = eng.project_reset(rho, m);  // unnormalized, the weight rides the trace
    encodings.push_back(m == 0 ? 1 : -1);
    rho = eng.post_measurement(rho, par);
  }
  return ad::pure_state_overlap(target, cavity_marginal(rho));
}

ExactTreeMetrics exact_tree_metrics(SbsEngine& eng, const FeedbackPolicy& policy,
                                    const MatrixXcd& rho0,
                                    const VectorXcd& target_cavity,
                                    const MatrixXcd& z_cavity, int half_cycles) {
  const std::vector<Branch> branches =
      enumerate_branches(eng, policy, rho0, half_cycles);
  const int n = eng.hilbert().n_fock;
  ExactTreeMetrics out;
  for (const Branch& b : branches) {
    const MatrixXcd cav = partial_trace_second(b.rho, n, 2);
    out.expected_return += b.probability * fidelity_pure(cav, target_cavity);
    out.expected_z += b.probability * logical_expectation(z_cavity, cav);
    out.probability_mass += b.probability;
  }
  return out;
}

EpochStats sampled_batch_gradient(const TrainConfig& cfg, TapedSbs& eng,
                                  FeedbackPolicy& policy, const MatrixXcd& rho0,
                                  const VectorXcd& target,
                                  const MatrixXcd& z_cavity, int epoch,
                                  std::mt19937& rng,
                                  std::vector<MatrixXd>& ascent_grads) {
  zero_like(policy.weights(), ascent_grads);
  EpochStats st;
  st.epoch = epoch;
  const int half_cycles = 2 * cfg.train_cycles;
  const double inv_b = 1.0 / double(cfg.batch_size);
  for (int b = 0; b < cfg.batch_size; ++b) {
    ad::Tape tape;
    policy.begin_taped(tape);
    eng.rebind(tape);
    TapedEpisode ep =
        run_policy_episode(eng, policy, rho0, target, half_cycles, rng);
    ad::Var surrogate = ep.reward + ad::detach(ep.reward) * ep.log_prob;
    tape.backward(surrogate.id);
    accumulate_param_grads(tape, policy.taped_param_ids(), inv_b, ascent_grads);
    st.infidelity += inv_b * (1.0 - ep.reward.value()(0, 0));
    st.z_expectation +=
        inv_b * logical_expectation(z_cavity, ad::cvalue(ep.cavity));
  }
  if (cfg.grad_clip > 0.0) {
    double sq = 0.0;
    for (const MatrixXd& g : ascent_grads) sq += g.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > cfg.grad_clip) {
      const double s = cfg.grad_clip / norm;
      for (MatrixXd& g : ascent_grads) g *= s;
    }
  }
  return st;
}

double exact_tree_gradient(const TrainConfig& cfg, TapedSbs& eng,
                           FeedbackPolicy& policy, const MatrixXcd& rho0,
                           const VectorXcd& target, int half_cycles,
                           std::vector<MatrixXd>& ascent_grads) {
  if (half_cycles < 1 || half_cycles > 16)
    throw ConfigError("exact tree depth must lie in [1, 16]");
  zero_like(policy.weights(), ascent_grads);
  double total = 0.0;
  const unsigned long n_branches = 1ul << half_cycles;
  std::string branch(std::size_t(half_cycles), 'g');
  for (unsigned long bits = 0; bits < n_branches; ++bits) {
    for (int h = 0; h < half_cycles; ++h)
      branch[std::size_t(h)] = (bits >> h) & 1ul ? 'e' : 'g';
    ad::Tape tape;
    policy.begin_taped(tape);
    eng.rebind(tape);
    ad::Var obj = branch_weighted_return(eng, policy, rho0, target, branch);
    total += obj.value()(0, 0);
    tape.backward(obj.id);
    accumulate_param_grads(tape, policy.taped_param_ids(), 1.0, ascent_grads);
  }
  return total;
}

TrainResult train_policy(const TrainConfig& cfg, PolicyKind kind,
                         const TrainObserver& observer) {
  cfg.validate();
  const Problem prob = make_problem(cfg);
  ad::Tape boot;
  TapedSbs teng(boot, cfg.hilbert, prob.noise, cfg.sbs);
  SbsEngine peng(cfg.hilbert, prob.noise, cfg.sbs);

  TrainResult result;
  result.agents.reserve(std::size_t(cfg.n_agents));
  for (int agent = 0; agent < cfg.n_agents; ++agent) {
    const unsigned agent_seed = cfg.seed + unsigned(agent);
    std::mt19937 rng(agent_seed);
    FeedbackPolicy policy = make_fresh_policy(kind, cfg, rng);
    AdamOptimizer opt(cfg.learning_rate);
    AgentResult ar;
    ar.seed = agent_seed;
    double baseline = 0.0;
    int streak = 0;
    std::vector<MatrixXd> grads;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const EpochStats st =
          sampled_batch_gradient(cfg, teng, policy, prob.rho0, prob.psi,
                                 prob.z_cav, epoch, rng, grads);
      opt.step(policy.weights(), grads);
      ar.curve.push_back(st);
      if (observer) observer(agent, st);
      if (epoch == 0) baseline = std::max(st.infidelity, 1e-9);
      if (st.infidelity > cfg.divergence_factor * baseline) {
        if (++streak >= cfg.divergence_patience) {
          ar.diverged = true;
          break;
        }
      } else {
        streak = 0;
      }
    }
    ar.policy = policy;
    if (!ar.diverged)
      ar.postselect_lifetime = postselect_lifetime(cfg, prob, peng, policy);
    result.agents.push_back(std::move(ar));
  }

  int best = -1;
  double best_lifetime = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < int(result.agents.size()); ++i) {
    const AgentResult& a = result.agents[std::size_t(i)];
    if (a.diverged) continue;
    if (a.postselect_lifetime > best_lifetime) {
      best_lifetime = a.postselect_lifetime;
      best = i;
    }
  }
  result.best_index = best;
  return result;
}

FeedbackPolicy optimize_lookup(const TrainConfig& cfg, int half_cycles,
                               const TrainObserver& observer) {
  cfg.validate();
  if (half_cycles < 1 || half_cycles > 12)
    throw ConfigError(
        "lookup optimization enumerates every branch; depth must lie in [1, 12]");
  const Problem prob = make_problem(cfg);
  ad::Tape boot;
  TapedSbs teng(boot, cfg.hilbert, prob.noise, cfg.sbs);
  std::mt19937 rng(cfg.seed);
  FeedbackPolicy policy = FeedbackPolicy::make_lookup(half_cycles, rng, 0.0);
  AdamOptimizer opt(cfg.learning_rate);
  std::vector<MatrixXd> grads;
  double prev = -1.0;
  int flat = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double objective = exact_tree_gradient(cfg, teng, policy, prob.rho0,
                                                 prob.psi, half_cycles, grads);
    opt.step(policy.weights(), grads);
    if (observer) {
      EpochStats st;
      st.epoch = epoch;
      st.infidelity = 1.0 - objective;
      st.z_expectation = std::numeric_limits<double>::quiet_NaN();
      observer(0, st);
    }
    if (epoch > 0 && std::abs(objective - prev) < 1e-10) {
      if (++flat >= 20) break;
    } else {
      flat = 0;
    }
    prev = objective;
  }
  return policy;
}

}  // namespace gkpqec
