#include "gkpqec/config.hpp"

#include <fstream>
#include <limits>

namespace gkpqec {

using nlohmann::json;

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

void require_keys_known(const json& j, const std::string& section,
                        const std::vector<std::string>& allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const std::string& k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("config section '" + section + "' has unknown key '" +
                        item.key() + "'");
  }
}

json config_section(const json& root, const std::string& name) {
  if (!root.contains(name)) return json::object();
  const json& j = root.at(name);
  if (!j.is_object())
    throw ConfigError("config section '" + name + "' must be an object");
  return j;
}

double get_number(const json& j, const std::string& section,
                  const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number())
    throw ConfigError("config key '" + section + "." + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& section, const std::string& key,
            int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError("config key '" + section + "." + key + "' must be an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& section, const std::string& key,
              bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean())
    throw ConfigError("config key '" + section + "." + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& section,
                       const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string())
    throw ConfigError("config key '" + section + "." + key + "' must be a string");
  return v.get<std::string>();
}

double get_lifetime(const json& j, const std::string& section,
                    const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw ConfigError("config key '" + section + "." + key +
                      "' must be a positive number or \"inf\"");
  }
  if (!v.is_number())
    throw ConfigError("config key '" + section + "." + key +
                      "' must be a positive number or \"inf\"");
  const double t = v.get<double>();
  if (!(t > 0.0))
    throw ConfigError("config key '" + section + "." + key + "' must be positive");
  return t;
}

HilbertConfig parse_hilbert(const json& root) {
  const json j = config_section(root, "hilbert");
  require_keys_known(j, "hilbert", {"n_fock"});
  HilbertConfig hc;
  hc.n_fock = get_int(j, "hilbert", "n_fock", hc.n_fock);
  hc.validate();
  return hc;
}

GkpStateSpec parse_state(const json& root) {
  const json j = config_section(root, "state");
  require_keys_known(j, "state",
                     {"lattice", "aspect", "delta", "shells",
                      "truncation_tolerance", "label"});
  GkpStateSpec spec;
  const std::string lattice = get_string(j, "state", "lattice", "square");
  const double aspect = get_number(j, "state", "aspect", 1.0);
  spec.lattice = CodeLattice::from_name(lattice, aspect);
  spec.delta = get_number(j, "state", "delta", spec.delta);
  spec.lattice_shells = get_int(j, "state", "shells", spec.lattice_shells);
  spec.truncation_tolerance =
      get_number(j, "state", "truncation_tolerance", spec.truncation_tolerance);
  spec.validate();
  return spec;
}

LogicalLabel parse_state_label(const json& root) {
  const json j = config_section(root, "state");
  return logical_label_from_name(get_string(j, "state", "label", "+Z"));
}

NoiseModel parse_noise(const json& root) {
  const json j = config_section(root, "noise");
  require_keys_known(j, "noise",
                     {"preset", "t_cavity", "t_qubit_relax", "t_qubit_deph",
                      "t_cavity_deph", "t_cavity_deph_lumped"});
  NoiseModel nm = NoiseModel::from_name(get_string(j, "noise", "preset", "none"));
  nm.t_cavity = get_lifetime(j, "noise", "t_cavity", nm.t_cavity);
  nm.t_qubit_relax = get_lifetime(j, "noise", "t_qubit_relax", nm.t_qubit_relax);
  nm.t_qubit_deph = get_lifetime(j, "noise", "t_qubit_deph", nm.t_qubit_deph);
  nm.t_cavity_deph = get_lifetime(j, "noise", "t_cavity_deph", nm.t_cavity_deph);
  nm.t_cavity_deph_lumped =
      get_lifetime(j, "noise", "t_cavity_deph_lumped", nm.t_cavity_deph_lumped);
  nm.validate();
  return nm;
}

HamiltonianParams parse_hamiltonian(const json& root) {
  const json j = config_section(root, "hamiltonian");
  require_keys_known(j, "hamiltonian", {"enabled", "chi", "kerr"});
  HamiltonianParams h;
  h.enabled = get_bool(j, "hamiltonian", "enabled", h.enabled);
  h.chi = get_number(j, "hamiltonian", "chi", h.chi);
  h.kerr = get_number(j, "hamiltonian", "kerr", h.kerr);
  return h;
}

SbsOptions parse_sbs(const json& root) {
  const json j = config_section(root, "sbs");
  require_keys_known(j, "sbs", {"schedule", "alpha_l4", "mode", "dt"});
  SbsOptions opt;
  opt.schedule = Schedule::from_name(get_string(j, "sbs", "schedule", "standard"));
  opt.alpha_l4 = get_number(j, "sbs", "alpha_l4", opt.alpha_l4);
  opt.mode = evolution_mode_from_name(get_string(j, "sbs", "mode", "superop"));
  opt.integrator.dt = get_number(j, "sbs", "dt", opt.integrator.dt);
  if (!(opt.integrator.dt > 0.0))
    throw ConfigError("config key 'sbs.dt' must be positive");
  opt.schedule.validate();
  return opt;
}

PolicySpec parse_policy(const json& root) {
  const json j = config_section(root, "policy");
  require_keys_known(j, "policy", {"kind", "file", "lookup_depth"});
  PolicySpec spec;
  spec.kind = get_string(j, "policy", "kind", spec.kind);
  policy_kind_from_name(spec.kind);
  spec.file = get_string(j, "policy", "file", spec.file);
  spec.lookup_depth = get_int(j, "policy", "lookup_depth", spec.lookup_depth);
  return spec;
}

FeedbackPolicy realize_policy(const PolicySpec& spec, unsigned seed) {
  if (!spec.file.empty()) {
    FeedbackPolicy p = FeedbackPolicy::load(spec.file);
    if (policy_kind_name(p.kind()) != spec.kind)
      throw ConfigError("policy file '" + spec.file + "' holds a " +
                        policy_kind_name(p.kind()) + " policy, config says " +
                        spec.kind);
    return p;
  }
  const PolicyKind kind = policy_kind_from_name(spec.kind);
  std::mt19937 rng(seed);
  switch (kind) {
    case PolicyKind::kStatic:
      return FeedbackPolicy::make_static();
    case PolicyKind::kLookup:
      return FeedbackPolicy::make_lookup(spec.lookup_depth, rng);
    case PolicyKind::kFnn:
      return FeedbackPolicy::make_fnn(rng);
    case PolicyKind::kGru:
      return FeedbackPolicy::make_gru(rng);
  }
  throw ConfigError("unhandled policy kind");
}

TrainConfig parse_train(const json& root, unsigned seed) {
  const json j = config_section(root, "train");
  require_keys_known(
      j, "train",
      {"epochs", "batch_size", "train_cycles", "learning_rate", "noise_preset",
       "n_agents", "grad_clip", "init_range", "bias_init", "lookup_depth",
       "divergence_factor", "divergence_patience", "postselect_cycles",
       "postselect_batch", "postselect_seed"});
  TrainConfig cfg;
  cfg.hilbert = parse_hilbert(root);
  cfg.state = parse_state(root);
  cfg.sbs = parse_sbs(root);
  cfg.seed = seed;

  // training needs a named preset; explicit lifetimes live in the noise
  // section only for simulation runs
  const json nj = config_section(root, "noise");
  cfg.noise_preset = get_string(nj, "noise", "preset", cfg.noise_preset);

  cfg.epochs = get_int(j, "train", "epochs", cfg.epochs);
  cfg.batch_size = get_int(j, "train", "batch_size", cfg.batch_size);
  cfg.train_cycles = get_int(j, "train", "train_cycles", cfg.train_cycles);
  cfg.learning_rate = get_number(j, "train", "learning_rate", cfg.learning_rate);
  cfg.noise_preset = get_string(j, "train", "noise_preset", cfg.noise_preset);
  cfg.n_agents = get_int(j, "train", "n_agents", cfg.n_agents);
  cfg.grad_clip = get_number(j, "train", "grad_clip", cfg.grad_clip);
  cfg.init_range = get_number(j, "train", "init_range", cfg.init_range);
  cfg.bias_init = get_number(j, "train", "bias_init", cfg.bias_init);
  cfg.lookup_depth = get_int(j, "train", "lookup_depth", cfg.lookup_depth);
  cfg.divergence_factor =
      get_number(j, "train", "divergence_factor", cfg.divergence_factor);
  cfg.divergence_patience =
      get_int(j, "train", "divergence_patience", cfg.divergence_patience);
  cfg.postselect_cycles =
      get_int(j, "train", "postselect_cycles", cfg.postselect_cycles);
  cfg.postselect_batch =
      get_int(j, "train", "postselect_batch", cfg.postselect_batch);
  cfg.postselect_seed = unsigned(
      get_int(j, "train", "postselect_seed", int(cfg.postselect_seed)));
  cfg.validate();
  return cfg;
}

void check_top_level(const json& root) {
  require_keys_known(root, "(top level)",
                     {"hilbert", "state", "noise", "hamiltonian", "sbs",
                      "policy", "run", "enumerate", "train", "evaluate"});
}

}  // namespace gkpqec
