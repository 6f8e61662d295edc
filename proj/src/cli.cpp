#include "gkpqec/cli.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "gkpqec/config.hpp"
#include "gkpqec/evaluation.hpp"
#include "gkpqec/fock.hpp"
#include "gkpqec/io.hpp"

namespace gkpqec {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliArgs {
  std::string config_path;
  unsigned seed = 1234;
  int threads = 1;
  std::string out_dir;
};

fs::path prepare_out_dir(const CliArgs& args, const std::string& subcommand) {
  fs::path out = args.out_dir.empty() ? fs::path("runs") / subcommand
                                      : fs::path(args.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out.string());
  return out;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream of(path);
  if (!of) throw ConfigError("cannot write " + path.string());
  of << j.dump(2) << "\n";
}

char parse_watch_axis(const json& run_section) {
  const std::string w = get_string(run_section, "run", "watch", "Z");
  if (w.size() != 1) throw ConfigError("run.watch must be X, Y or Z");
  const char axis = char(std::toupper(static_cast<unsigned char>(w[0])));
  if (axis != 'X' && axis != 'Y' && axis != 'Z')
    throw ConfigError("run.watch must be X, Y or Z");
  return axis;
}

MatrixXcd joint_from_cavity(const VectorXcd& psi) {
  MatrixXcd qubit_g = MatrixXcd::Zero(2, 2);
  qubit_g(0, 0) = 1.0;
  return kron(MatrixXcd(psi * psi.adjoint()), qubit_g);
}

int cmd_prepare_state(const json& root, const CliArgs& args) {
  const fs::path out = prepare_out_dir(args, "prepare-state");
  const HilbertConfig hc = parse_hilbert(root);
  const GkpStateSpec spec = parse_state(root);
  const LogicalLabel label = parse_state_label(root);
  const VectorXcd psi = logical_state(label, spec, hc);

  const int n = hc.n_fock;
  const MatrixXcd rho = psi * psi.adjoint();
  json summary;
  summary["label"] = logical_label_name(label);
  summary["n_fock"] = n;
  summary["delta"] = spec.delta;
  summary["mean_photon"] = mean_photon(psi);
  for (const char axis : {'X', 'Y', 'Z'}) {
    const MatrixXcd p = pauli_operator(axis, spec.lattice, n);
    summary[std::string("pauli_") + axis] = logical_expectation(p, rho);
    if (axis != 'Y') {
      const MatrixXcd s = stabilizer_operator(axis, spec.lattice, n);
      summary[std::string("stabilizer_") + axis] = logical_expectation(s, rho);
    }
  }
  save_state_json(out / "state.json", psi);
  save_state_csv(out / "state.csv", psi);

  const json run = config_section(root, "run");
  if (get_bool(run, "run", "wigner", false)) {
    const double extent = get_number(run, "run", "wigner_extent", 4.5);
    const int points = get_int(run, "run", "wigner_points", 81);
    if (extent <= 0.0 || points < 2)
      throw ConfigError("run.wigner_extent must be positive and run.wigner_points >= 2");
    const VectorXd qs = VectorXd::LinSpaced(points, -extent, extent);
    const WignerGrid grid = wigner_grid(psi, qs, qs);
    std::vector<std::vector<double>> rows;
    rows.reserve(std::size_t(points) * std::size_t(points));
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j)
        rows.push_back({grid.q(i), grid.p(j), grid.value(i, j)});
    save_csv(out / "wigner.csv", {"q", "p", "w"}, rows);
    summary["wigner_file"] = "wigner.csv";
  }

  write_json_file(out / "summary.json", summary);
  std::cout << "prepared " << logical_label_name(label) << ": mean photon "
            << format_double(summary["mean_photon"].get<double>()) << ", files in "
            << out.string() << "\n";
  return 0;
}

int cmd_run_qec(const json& root, const CliArgs& args) {
  const fs::path out = prepare_out_dir(args, "run-qec");
  const HilbertConfig hc = parse_hilbert(root);
  const GkpStateSpec spec = parse_state(root);
  const LogicalLabel label = parse_state_label(root);
  const NoiseModel noise = parse_noise(root);
  const HamiltonianParams ham = parse_hamiltonian(root);
  const SbsOptions sopt = parse_sbs(root);
  const json run = config_section(root, "run");
  require_keys_known(run, "run",
                     {"cycles", "batch", "forced", "watch", "save_state",
                      "wigner", "wigner_extent", "wigner_points"});
  const int cycles = get_int(run, "run", "cycles", 10);
  const int batch = get_int(run, "run", "batch", 1);
  if (cycles < 1 || batch < 1)
    throw ConfigError("run.cycles and run.batch must be positive");
  const std::string forced = get_string(run, "run", "forced", "");
  const char axis = parse_watch_axis(run);

  const VectorXcd psi = logical_state(label, spec, hc);
  const MatrixXcd rho0 = joint_from_cavity(psi);
  const MatrixXcd watch_op = pauli_operator(axis, spec.lattice, hc.n_fock);
  const FeedbackPolicy policy = realize_policy(parse_policy(root), args.seed);
  SbsEngine eng(hc, noise, sopt, ham);

  TrajectoryOptions topt;
  topt.half_cycles = 2 * cycles;
  topt.forced = forced;
  topt.watch_cavity_op = &watch_op;

  std::mt19937 rng(args.seed);
  std::ofstream jsonl(out / "trajectories.jsonl");
  if (!jsonl) throw ConfigError("cannot write " + (out / "trajectories.jsonl").string());

  double mean_final_fidelity = 0.0;
  double mean_final_watch = 0.0;
  for (int b = 0; b < batch; ++b) {
    const TrajectoryResult tr = run_trajectory(eng, policy, rho0, topt, rng);
    json line;
    line["trajectory"] = b;
    std::string outcomes;
    std::vector<double> watch;
    watch.reserve(tr.steps.size());
    for (const TrajectoryStep& st : tr.steps) {
      if (st.outcome >= 0) outcomes.push_back(st.outcome == 0 ? 'g' : 'e');
      watch.push_back(st.z_logical);
    }
    line["outcomes"] = outcomes;
    line["log_prob"] = tr.log_prob;
    line["watch"] = watch;
    const MatrixXcd cav = partial_trace_second(tr.rho, hc.n_fock, 2);
    const double fid = fidelity_pure(cav, psi);
    line["final_fidelity"] = fid;
    jsonl << line.dump() << "\n";
    mean_final_fidelity += fid / double(batch);
    mean_final_watch += watch.back() / double(batch);
    if (b == 0 && get_bool(run, "run", "save_state", false))
      save_matrix_binary(out / "final_state.bin", tr.rho);
  }

  json summary;
  summary["cycles"] = cycles;
  summary["batch"] = batch;
  summary["watch_axis"] = std::string(1, axis);
  summary["mean_final_fidelity"] = mean_final_fidelity;
  summary["mean_final_watch"] = mean_final_watch;
  summary["frame_note"] =
      "watch values are raw; the protocol flips the X/Z frame every full cycle";
  write_json_file(out / "summary.json", summary);
  std::cout << "ran " << batch << " trajectories of " << cycles
            << " cycles: mean final fidelity "
            << format_double(mean_final_fidelity) << ", files in " << out.string()
            << "\n";
  return 0;
}

int cmd_enumerate(const json& root, const CliArgs& args) {
  const fs::path out = prepare_out_dir(args, "enumerate");
  const HilbertConfig hc = parse_hilbert(root);
  const GkpStateSpec spec = parse_state(root);
  const LogicalLabel label = parse_state_label(root);
  const NoiseModel noise = parse_noise(root);
  const HamiltonianParams ham = parse_hamiltonian(root);
  const SbsOptions sopt = parse_sbs(root);
  const json en = config_section(root, "enumerate");
  require_keys_known(en, "enumerate", {"half_cycles", "prune_below"});
  const int depth = get_int(en, "enumerate", "half_cycles", 4);
  const double prune = get_number(en, "enumerate", "prune_below", 0.0);

  const VectorXcd psi = logical_state(label, spec, hc);
  const MatrixXcd rho0 = joint_from_cavity(psi);
  const MatrixXcd z_op = pauli_operator('Z', spec.lattice, hc.n_fock);
  const FeedbackPolicy policy = realize_policy(parse_policy(root), args.seed);
  SbsEngine eng(hc, noise, sopt, ham);

  const std::vector<Branch> branches =
      enumerate_branches(eng, policy, rho0, depth, prune);
  json out_branches = json::array();
  double mass = 0.0, mean_fid = 0.0, mean_z = 0.0;
  for (const Branch& b : branches) {
    const MatrixXcd cav = partial_trace_second(b.rho, hc.n_fock, 2);
    const double fid = fidelity_pure(cav, psi);
    const double z = logical_expectation(z_op, cav);
    out_branches.push_back({{"outcomes", b.outcomes},
                            {"probability", b.probability},
                            {"fidelity", fid},
                            {"z", z}});
    mass += b.probability;
    mean_fid += b.probability * fid;
    mean_z += b.probability * z;
  }
  json summary;
  summary["half_cycles"] = depth;
  summary["branches"] = out_branches;
  summary["probability_mass"] = mass;
  summary["expected_fidelity"] = mean_fid;
  summary["expected_z"] = mean_z;
  write_json_file(out / "branches.json", summary);
  std::cout << "enumerated " << branches.size() << " branches over " << depth
            << " half-cycles: mass " << format_double(mass)
            << ", expected fidelity " << format_double(mean_fid) << ", files in "
            << out.string() << "\n";
  return 0;
}

int cmd_train(const json& root, const CliArgs& args) {
  const fs::path out = prepare_out_dir(args, "train");
  const PolicySpec pspec = parse_policy(root);
  if (!pspec.file.empty())
    throw ConfigError("training starts from fresh weights; remove policy.file");
  const PolicyKind kind = policy_kind_from_name(pspec.kind);
  TrainConfig cfg = parse_train(root, args.seed);
  cfg.lookup_depth = pspec.lookup_depth;

  const TrainObserver observer = [](int agent, const EpochStats& st) {
    std::printf("agent %d epoch %d infidelity %.6e z %.4f\n", agent, st.epoch,
                st.infidelity, st.z_expectation);
    std::fflush(stdout);
  };
  const TrainResult result = train_policy(cfg, kind, observer);

  json summary;
  summary["policy"] = pspec.kind;
  summary["best_index"] = result.best_index;
  json agents = json::array();
  for (std::size_t i = 0; i < result.agents.size(); ++i) {
    const AgentResult& a = result.agents[i];
    agents.push_back({{"seed", a.seed},
                      {"diverged", a.diverged},
                      {"postselect_lifetime_cycles", a.postselect_lifetime}});
    std::vector<std::vector<double>> rows;
    rows.reserve(a.curve.size());
    for (const EpochStats& st : a.curve)
      rows.push_back({double(st.epoch), st.infidelity, st.z_expectation});
    save_csv(out / ("agent_" + std::to_string(i) + "_curve.csv"),
             {"epoch", "infidelity", "z"}, rows);
    a.policy.save((out / ("agent_" + std::to_string(i) + "_policy.json")).string());
  }
  summary["agents"] = agents;
  if (result.best_index >= 0) {
    result.agents[std::size_t(result.best_index)].policy.save(
        (out / "policy_best.json").string());
    summary["best_policy_file"] = "policy_best.json";
  }
  write_json_file(out / "summary.json", summary);
  std::cout << "trained " << result.agents.size() << " agents; best index "
            << result.best_index << ", files in " << out.string() << "\n";
  return 0;
}

int cmd_evaluate(const json& root, const CliArgs& args) {
  const fs::path out = prepare_out_dir(args, "evaluate");
  const HilbertConfig hc = parse_hilbert(root);
  const GkpStateSpec spec = parse_state(root);
  const NoiseModel noise = parse_noise(root);
  const HamiltonianParams ham = parse_hamiltonian(root);
  const SbsOptions sopt = parse_sbs(root);
  const json ev = config_section(root, "evaluate");
  require_keys_known(ev, "evaluate",
                     {"mode", "cycles", "batch", "axis", "amplitude_re",
                      "amplitude_im", "aspects"});
  const std::string mode = get_string(ev, "evaluate", "mode", "lifetime");
  const int cycles = get_int(ev, "evaluate", "cycles", 100);
  const int batch = get_int(ev, "evaluate", "batch", 32);
  const FeedbackPolicy policy = realize_policy(parse_policy(root), args.seed);

  json summary;
  summary["mode"] = mode;

  if (mode == "lifetime") {
    const LogicalLabel label = parse_state_label(root);
    const VectorXcd psi = logical_state(label, spec, hc);
    const MatrixXcd rho0 = joint_from_cavity(psi);
    const std::string axis_s = get_string(ev, "evaluate", "axis", "Z");
    if (axis_s.size() != 1) throw ConfigError("evaluate.axis must be X, Y or Z");
    LifetimeOptions lo;
    lo.cycles = cycles;
    lo.batch = batch;
    lo.seed = args.seed;
    lo.axis = axis_s[0];
    const MatrixXcd op = pauli_operator(
        char(std::toupper(static_cast<unsigned char>(lo.axis))), spec.lattice,
        hc.n_fock);
    SbsEngine eng(hc, noise, sopt, ham);
    const LifetimeResult lt = logical_lifetime(eng, policy, rho0, op, lo);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < lt.times.size(); ++i)
      rows.push_back({lt.times[i], lt.mean[i]});
    save_csv(out / "decay.csv", {"cycle", "expectation"}, rows);
    summary["tau_cycles"] = lt.fit.tau;
    summary["tau_us"] = lt.fit.tau * kTauCycleMicroseconds;
    summary["amplitude"] = lt.fit.amplitude;
    summary["rms_residual"] = lt.fit.rms_residual;
    std::cout << "lifetime along " << axis_s << ": "
              << format_double(lt.fit.tau) << " cycles ("
              << format_double(lt.fit.tau * kTauCycleMicroseconds)
              << " us), files in " << out.string() << "\n";
  } else if (mode == "injection") {
    const LogicalLabel label = parse_state_label(root);
    const VectorXcd psi = logical_state(label, spec, hc);
    const Complex amp(get_number(ev, "evaluate", "amplitude_re", 0.0),
                      get_number(ev, "evaluate", "amplitude_im", 0.0));
    const MatrixXcd rho0 = inject_displacement(joint_from_cavity(psi), amp, hc);
    const MatrixXcd z_op = pauli_operator('Z', spec.lattice, hc.n_fock);
    SbsEngine eng(hc, noise, sopt, ham);
    TrajectoryOptions topt;
    topt.half_cycles = 2 * cycles;
    topt.watch_cavity_op = &z_op;
    std::mt19937 rng(args.seed);
    std::vector<double> mean(std::size_t(cycles), 0.0);
    double initial = 0.0;
    for (int b = 0; b < batch; ++b) {
      const TrajectoryResult tr = run_trajectory(eng, policy, rho0, topt, rng);
      for (int k = 1; k <= cycles; ++k) {
        double v = tr.steps[std::size_t(2 * k - 1)].z_logical;
        if (k % 2 == 1) v = -v;  // per-cycle frame flip
        mean[std::size_t(k - 1)] += v / double(batch);
      }
    }
    initial = logical_expectation(z_op, partial_trace_second(rho0, hc.n_fock, 2));
    std::vector<std::vector<double>> rows;
    for (int k = 1; k <= cycles; ++k)
      rows.push_back({double(k), mean[std::size_t(k - 1)]});
    save_csv(out / "injection.csv", {"cycle", "z"}, rows);
    summary["amplitude_re"] = amp.real();
    summary["amplitude_im"] = amp.imag();
    summary["z_after_injection"] = initial;
    summary["z_final"] = mean.back();
    std::cout << "injection " << format_double(amp.real()) << "+"
              << format_double(amp.imag()) << "i: z after injection "
              << format_double(initial) << ", after " << cycles << " cycles "
              << format_double(mean.back()) << ", files in " << out.string()
              << "\n";
  } else if (mode == "saturation") {
    const LogicalLabel label = parse_state_label(root);
    const VectorXcd psi = logical_state(label, spec, hc);
    const MatrixXcd rho0 = joint_from_cavity(psi);
    SbsEngine eng(hc, noise, sopt, ham);
    if (!eng.measured())
      throw ConfigError("saturation statistics need a measured schedule");
    TrajectoryOptions topt;
    topt.half_cycles = 2 * cycles;
    std::mt19937 rng(args.seed);
    std::vector<double> p_excited(std::size_t(2 * cycles), 0.0);
    for (int b = 0; b < batch; ++b) {
      const TrajectoryResult tr = run_trajectory(eng, policy, rho0, topt, rng);
      for (std::size_t h = 0; h < tr.steps.size(); ++h)
        if (tr.steps[h].outcome == 1) p_excited[h] += 1.0 / double(batch);
    }
    std::vector<double> halves(p_excited.size());
    for (std::size_t h = 0; h < halves.size(); ++h) halves[h] = double(h + 1);
    const SaturationFit fit = fit_saturation(halves, p_excited);
    std::vector<std::vector<double>> rows;
    for (std::size_t h = 0; h < halves.size(); ++h)
      rows.push_back({halves[h], p_excited[h]});
    save_csv(out / "saturation.csv", {"half_cycle", "p_excited"}, rows);
    summary["p_inf"] = fit.p_inf;
    summary["p0"] = fit.p0;
    summary["gamma"] = fit.gamma;
    summary["rms_residual"] = fit.rms_residual;
    std::cout << "excited-outcome rate saturates at "
              << format_double(fit.p_inf) << " (rate "
              << format_double(fit.gamma) << " per half-cycle), files in "
              << out.string() << "\n";
  } else if (mode == "bias-sweep") {
    if (!ev.contains("aspects") || !ev.at("aspects").is_array())
      throw ConfigError("evaluate.aspects must be an array of aspect ratios");
    std::vector<double> aspects;
    for (const auto& a : ev.at("aspects")) {
      if (!a.is_number())
        throw ConfigError("evaluate.aspects entries must be numbers");
      aspects.push_back(a.get<double>());
    }
    std::vector<std::vector<double>> rows;
    for (const double aspect : aspects) {
      GkpStateSpec s = spec;
      s.lattice = CodeLattice::rectangular(aspect);
      double taus[2];
      const char axes[2] = {'X', 'Z'};
      for (int i = 0; i < 2; ++i) {
        const LogicalLabel lab =
            axes[i] == 'X' ? LogicalLabel::plus_x : LogicalLabel::plus_z;
        const VectorXcd psi = logical_state(lab, s, hc);
        const MatrixXcd rho0 = joint_from_cavity(psi);
        const MatrixXcd op = pauli_operator(axes[i], s.lattice, hc.n_fock);
        LifetimeOptions lo;
        lo.cycles = cycles;
        lo.batch = batch;
        lo.seed = args.seed;
        lo.axis = axes[i];
        SbsEngine eng(hc, noise, sopt, ham);
        taus[i] = logical_lifetime(eng, policy, rho0, op, lo).fit.tau;
      }
      rows.push_back({aspect, taus[0], taus[1]});
      std::cout << "aspect " << format_double(aspect) << ": tau_x "
                << format_double(taus[0]) << " cycles, tau_z "
                << format_double(taus[1]) << " cycles\n";
    }
    save_csv(out / "bias.csv", {"aspect", "tau_x_cycles", "tau_z_cycles"}, rows);
    summary["aspects"] = aspects;
    std::cout << "bias sweep over " << aspects.size() << " aspects, files in "
              << out.string() << "\n";
  } else {
    throw ConfigError("evaluate.mode must be lifetime, injection, saturation or bias-sweep");
  }

  write_json_file(out / "summary.json", summary);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"finite-energy bosonic-code error correction toolkit"};
  app.fallthrough();
  CliArgs args;
  app.add_option("--config", args.config_path, "JSON run configuration file");
  app.add_option("--seed", args.seed, "random seed");
  app.add_option("--threads", args.threads, "worker thread cap");
  app.add_option("--out", args.out_dir, "output directory");

  CLI::App* prep = app.add_subcommand(
      "prepare-state", "construct a logical state and report its figures");
  CLI::App* run = app.add_subcommand(
      "run-qec", "sample feedback-correction trajectories");
  CLI::App* train = app.add_subcommand(
      "train", "policy-gradient training of a feedback controller");
  CLI::App* eval = app.add_subcommand(
      "evaluate", "lifetimes, error injection and bias sweeps");
  CLI::App* enumerate = app.add_subcommand(
      "enumerate", "exact expansion of the measurement-outcome tree");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (args.threads < 1) throw ConfigError("--threads must be at least 1");
    Eigen::setNbThreads(args.threads);
    const json root = args.config_path.empty()
                          ? json::object()
                          : load_config_file(args.config_path);
    check_top_level(root);
    if (prep->parsed()) return cmd_prepare_state(root, args);
    if (run->parsed()) return cmd_run_qec(root, args);
    if (train->parsed()) return cmd_train(root, args);
    if (eval->parsed()) return cmd_evaluate(root, args);
    if (enumerate->parsed()) return cmd_enumerate(root, args);
    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace gkpqec
