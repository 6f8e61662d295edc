#include "gkpqec/sbs.hpp"

#include <cmath>

#include "gkpqec/fock.hpp"

namespace gkpqec {

EvolutionMode evolution_mode_from_name(const std::string& name) {
  if (name == "rk4") return EvolutionMode::kRk4;
  if (name == "superop") return EvolutionMode::kSuperop;
  throw ConfigError("unknown evolution mode '" + name + "' (expected rk4 or superop)");
}

SbsEngine::SbsEngine(const HilbertConfig& hc, const NoiseModel& noise,
                     const SbsOptions& opt, const HamiltonianParams& ham)
    : hc_(hc), opt_(opt), gen_(hc, noise, ham) {
  hc_.validate();
  opt_.schedule.validate();
  opt_.integrator.validate();
  if (opt_.mode == EvolutionMode::kSuperop) prop_.emplace(gen_);
}

MatrixXcd SbsEngine::idle(MatrixXcd rho, double duration) {
  if (duration == 0.0) return rho;
  if (opt_.mode == EvolutionMode::kRk4) return evolve_rk4(gen_, std::move(rho), duration, opt_.integrator);
  return prop_->apply(rho, duration);
}

MatrixXcd SbsEngine::pre_measurement(MatrixXcd rho, const HalfCycleParams& p) {
  const int n = hc_.n_fock;
  rho = idle(std::move(rho), opt_.schedule.entering);
  for (int l = 0; l < 4; ++l) {
    rho = apply_unitary(embed_qubit(qubit_rotation(p.phi[l], p.theta[l]), n), rho);
    if (l < 3) {
      rho = apply_unitary(ecd_operator(p.beta[l], n), rho);
    } else if (opt_.alpha_l4 != 0.0) {
      rho = apply_unitary(
          embed_cavity(displacement_operator(Complex(opt_.alpha_l4, 0.0), n)), rho);
    }
    rho = idle(std::move(rho), opt_.schedule.layer[l]);
  }
  return rho;
}

MatrixXcd SbsEngine::post_measurement(MatrixXcd rho, const HalfCycleParams& p) {
  const int n = hc_.n_fock;
  rho = idle(std::move(rho), opt_.schedule.measurement);
  rho = apply_unitary(embed_cavity(virtual_rotation(p.theta_vr, n)), rho);
  rho = idle(std::move(rho), opt_.schedule.rotation);
  rho = 0.5 * (rho + rho.adjoint().eval());
  return rho;
}

double SbsEngine::ground_probability(const MatrixXcd& rho) const {
  double p = 0.0;
  for (int ic = 0; ic < hc_.n_fock; ++ic) p += rho(ic * 2, ic * 2).real();
  return p;
}

MatrixXcd SbsEngine::project_reset(const MatrixXcd& rho, int outcome) const {
  if (outcome != 0 && outcome != 1)
    throw ConfigError("measurement outcome must be 0 (ground) or 1 (excited)");
  const int n = hc_.n_fock;
  MatrixXcd out = MatrixXcd::Zero(2 * n, 2 * n);
  for (int jc = 0; jc < n; ++jc)
    for (int ic = 0; ic < n; ++ic)
      out(ic * 2, jc * 2) = rho(ic * 2 + outcome, jc * 2 + outcome);
  return out;
}

MatrixXcd SbsEngine::unconditional_reset(const MatrixXcd& rho) const {
  const int n = hc_.n_fock;
  MatrixXcd out = MatrixXcd::Zero(2 * n, 2 * n);
  for (int jc = 0; jc < n; ++jc)
    for (int ic = 0; ic < n; ++ic)
      out(ic * 2, jc * 2) = rho(ic * 2, jc * 2) + rho(ic * 2 + 1, jc * 2 + 1);
  return out;
}

namespace {

double joint_cavity_expectation(const MatrixXcd& op_c, const MatrixXcd& rho) {
  // Re tr[(op (x) I) rho] without forming the joint operator.
  Complex acc = 0.0;
  const int n = int(op_c.rows());
  for (int ic = 0; ic < n; ++ic)
    for (int jc = 0; jc < n; ++jc)
      for (int q = 0; q < 2; ++q) acc += op_c(ic, jc) * rho(jc * 2 + q, ic * 2 + q);
  return acc.real();
}

}  // namespace

int outcome_from_char(char c) {
  if (c == 'g' || c == 'G' || c == '0') return 0;
  if (c == 'e' || c == 'E' || c == '1') return 1;
  throw ConfigError(std::string("forced outcome character '") + c +
                    "' is not one of g/e");
}

TrajectoryResult run_trajectory(SbsEngine& eng, const FeedbackPolicy& policy,
                                MatrixXcd rho0, const TrajectoryOptions& opt,
                                std::mt19937& rng) {
  if (opt.half_cycles < 1) throw ConfigError("trajectory needs at least one half-cycle");
  if (eng.measured() && !opt.forced.empty() &&
      int(opt.forced.size()) < opt.half_cycles)
    throw ConfigError("forced outcome string is shorter than the trajectory");

  TrajectoryResult res;
  res.encodings.reserve(opt.half_cycles);
  res.steps.reserve(opt.half_cycles);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  MatrixXcd rho = std::move(rho0);

  for (int h = 0; h < opt.half_cycles; ++h) {
    const HalfCycleParams p = policy.query(res.encodings);
    TrajectoryStep st;
    st.params = p.flatten();
    rho = eng.pre_measurement(std::move(rho), p);

    if (eng.measured()) {
      const double pg = eng.ground_probability(rho);
      int m;
      if (!opt.forced.empty())
        m = outcome_from_char(opt.forced[std::size_t(h)]);
      else
        m = u01(rng) < pg ? 0 : 1;
      const double pm = m == 0 ? pg : 1.0 - pg;
      if (pm < 1e-12)
        throw NumericalError("measurement branch " + std::string(1, "ge"[m]) +
                             " at half-cycle " + std::to_string(h + 1) +
                             " has vanishing probability");
      rho = eng.project_reset(rho, m) / pm;
      st.outcome = m;
      st.probability = pm;
      res.encodings.push_back(m == 0 ? 1 : -1);
      res.log_prob += std::log(pm);
    } else {
      rho = eng.unconditional_reset(rho);
    }

    rho = eng.post_measurement(std::move(rho), p);
    if (opt.watch_cavity_op != nullptr)
      st.z_logical = joint_cavity_expectation(*opt.watch_cavity_op, rho);
    res.steps.push_back(st);
  }
  res.rho = std::move(rho);
  return res;
}

namespace {

void enumerate_dfs(SbsEngine& eng, const FeedbackPolicy& policy, const MatrixXcd& rho,
                   int remaining, double prune_below, std::vector<int>& encodings,
                   std::string& prefix, std::vector<Branch>& out) {
  if (remaining == 0) {
    const double prob = rho.trace().real();
    Branch b;
    b.outcomes = prefix;
    b.probability = prob;
    b.rho = rho / prob;
    out.push_back(std::move(b));
    return;
  }
  const HalfCycleParams p = policy.query(encodings);
  const MatrixXcd evolved = eng.pre_measurement(rho, p);
  for (int m = 0; m < 2; ++m) {
    MatrixXcd projected = eng.project_reset(evolved, m);
    const double mass = projected.trace().real();
    if (mass <= prune_below || mass <= 0.0) continue;
    projected = eng.post_measurement(std::move(projected), p);
    encodings.push_back(m == 0 ? 1 : -1);
    prefix.push_back("ge"[m]);
    enumerate_dfs(eng, policy, projected, remaining - 1, prune_below, encodings,
                  prefix, out);
    prefix.pop_back();
    encodings.pop_back();
  }
}

}  // namespace

std::vector<Branch> enumerate_branches(SbsEngine& eng, const FeedbackPolicy& policy,
                                       const MatrixXcd& rho0, int half_cycles,
                                       double prune_below) {
  if (!eng.measured())
    throw ConfigError("branch enumeration needs a measured schedule");
  if (half_cycles < 1 || half_cycles > 24)
    throw ConfigError("branch enumeration depth must lie in [1, 24]");
  std::vector<Branch> out;
  out.reserve(std::size_t(1) << std::min(half_cycles, 12));
  std::vector<int> encodings;
  std::string prefix;
  enumerate_dfs(eng, policy, rho0, half_cycles, prune_below, encodings, prefix, out);
  return out;
}

TapedSbs::TapedSbs(ad::Tape& tape, const HilbertConfig& hc, const NoiseModel& noise,
                   const SbsOptions& opt, const HamiltonianParams& ham)
    : tape_(&tape), hc_(hc), opt_(opt), gen_(hc, noise, ham), prop_(gen_) {
  hc_.validate();
  opt_.schedule.validate();
  if (opt_.alpha_l4 != 0.0) {
    layer4_unitary_ =
        embed_cavity(displacement_operator(Complex(opt_.alpha_l4, 0.0), hc_.n_fock));
    has_layer4_ = true;
  }
  rebind(tape);
}

void TapedSbs::rebind(ad::Tape& tape) {
  // fresh tape, same engine: only the tape constants are re-pushed, the
  // propagator keeps its per-duration exponentials
  tape_ = &tape;
  segment_consts_.clear();
  const MatrixXcd a = annihilation_operator(hc_.n_fock);
  adag_minus_a_ = tape.constant((a.adjoint() - a).real());
  adag_plus_a_ = tape.constant((a.adjoint() + a).real());
}

ad::CVar TapedSbs::lift(const MatrixXcd& rho0) { return ad::cconstant(*tape_, rho0); }

ad::CVar TapedSbs::idle(ad::CVar rho, double duration) {
  if (duration == 0.0 || prop_.trivial()) return rho;
  auto it = segment_consts_.find(duration);
  if (it == segment_consts_.end()) {
    ad::CVar pc = ad::cconstant(*tape_, prop_.cavity_map(duration));
    ad::CVar pqt = ad::cconstant(*tape_, prop_.qubit_map(duration).transpose());
    it = segment_consts_.emplace(duration, std::make_pair(pc, pqt)).first;
  }
  const int n = hc_.n_fock;
  ad::CVar pair = ad::cpair_permute(rho, n, true);
  ad::CVar mapped = ad::cmul(it->second.first, ad::cmul(pair, it->second.second));
  return ad::cpair_permute(mapped, n, false);
}

ad::CVar TapedSbs::taped_rotation_joint(ad::Var phi, ad::Var theta) {
  ad::Tape& t = *tape_;
  ad::Var c = ad::cos(0.5 * theta);
  ad::Var s = ad::sin(0.5 * theta);
  ad::Var cp = ad::cos(phi);
  ad::Var sp = ad::sin(phi);
  ad::Var ssp = s * sp;
  ad::Var scp = s * cp;
  ad::Var neg_ssp = -ssp;
  ad::Var neg_scp = -scp;
  int re = t.from_entries(2, 2,
                          {{0, 0, c.id}, {1, 1, c.id}, {0, 1, neg_ssp.id}, {1, 0, ssp.id}});
  int im = t.from_entries(2, 2, {{0, 1, neg_scp.id}, {1, 0, neg_scp.id}});
  ad::CVar r2{{&t, re}, {&t, im}};
  return ad::ckron_const_left(MatrixXcd::Identity(hc_.n_fock, hc_.n_fock), r2);
}

ad::CVar TapedSbs::taped_ecd(ad::Var beta_re, ad::Var beta_im) {
  ad::Tape& t = *tape_;
  ad::Var br2 = 0.5 * beta_re;
  ad::Var bi2 = 0.5 * beta_im;
  // exponent of D(beta/2): (beta/2) a^dag - (conj beta/2) a
  ad::CVar z{{&t, t.scalar_mul(br2.id, adag_minus_a_)},
             {&t, t.scalar_mul(bi2.id, adag_plus_a_)}};
  ad::CVar d_half = ad::cmatexp(z);
  return ad::cqubit_assemble(
      hc_.n_fock, {{1, 0, d_half}, {0, 1, ad::cadjoint(d_half)}});
}

ad::CVar TapedSbs::taped_vr_joint(ad::Var theta) {
  ad::Tape& t = *tape_;
  const int n = hc_.n_fock;
  std::vector<std::tuple<int, int, int>> re_entries, im_entries;
  re_entries.reserve(std::size_t(n));
  im_entries.reserve(std::size_t(n));
  for (int k = 0; k < n; ++k) {
    ad::Var tk = double(k) * theta;
    re_entries.emplace_back(k, k, ad::cos(tk).id);
    im_entries.emplace_back(k, k, ad::sin(tk).id);
  }
  ad::CVar vr{{&t, t.from_entries(n, n, re_entries)},
              {&t, t.from_entries(n, n, im_entries)}};
  return ad::ckron_const_right(vr, MatrixXcd::Identity(2, 2));
}

ad::CVar TapedSbs::pre_measurement(ad::CVar rho, const std::array<ad::Var, 15>& p) {
  rho = idle(rho, opt_.schedule.entering);
  for (int l = 0; l < 4; ++l) {
    ad::CVar r = taped_rotation_joint(p[std::size_t(2 * l)], p[std::size_t(2 * l + 1)]);
    rho = ad::conjugate(r, rho);
    if (l < 3) {
      ad::CVar e = taped_ecd(p[std::size_t(8 + 2 * l)], p[std::size_t(9 + 2 * l)]);
      rho = ad::conjugate(e, rho);
    } else if (has_layer4_) {
      rho = ad::conjugate(ad::cconstant(*tape_, layer4_unitary_), rho);
    }
    rho = idle(rho, opt_.schedule.layer[std::size_t(l)]);
  }
  return rho;
}

ad::CVar TapedSbs::post_measurement(ad::CVar rho, const std::array<ad::Var, 15>& p) {
  rho = idle(rho, opt_.schedule.measurement);
  rho = ad::conjugate(taped_vr_joint(p[14]), rho);
  return idle(rho, opt_.schedule.rotation);
}

ad::Var TapedSbs::outcome_probability(ad::CVar rho, int outcome) {
  if (outcome != 0 && outcome != 1)
    throw ConfigError("measurement outcome must be 0 (ground) or 1 (excited)");
  return ad::creal_trace(ad::cqubit_block(rho, outcome, outcome));
}

ad::CVar TapedSbs::project_reset(ad::CVar rho, int outcome) {
  if (outcome != 0 && outcome != 1)
    throw ConfigError("measurement outcome must be 0 (ground) or 1 (excited)");
  return ad::cqubit_assemble(hc_.n_fock,
                             {{0, 0, ad::cqubit_block(rho, outcome, outcome)}});
}

ad::CVar TapedSbs::unconditional_reset(ad::CVar rho) {
  return ad::cqubit_assemble(
      hc_.n_fock,
      {{0, 0, ad::cadd(ad::cqubit_block(rho, 0, 0), ad::cqubit_block(rho, 1, 1))}});
}

}  // namespace gkpqec
