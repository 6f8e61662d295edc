#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "gkpqec/fock.hpp"
#include "gkpqec/sbs.hpp"
#include "gkpqec/trainer.hpp"

using namespace gkpqec;

// Sweeps the layer-4 return displacement over a grid and reports the exact
// expected fidelity at the chosen tree depth, so the fixed protocol value can
// be picked outside of gradient training.
int main(int argc, char** argv) {
  CLI::App app{"grid search over the layer-4 return displacement"};
  int n_fock = 25;
  double delta = 0.34;
  int half_cycles = 4;
  double lo = -0.4;
  double hi = 0.4;
  int points = 17;
  std::string noise_name = "none";
  app.add_option("--n-fock", n_fock, "Fock cutoff");
  app.add_option("--delta", delta, "envelope width");
  app.add_option("--half-cycles", half_cycles, "tree depth");
  app.add_option("--lo", lo, "grid start");
  app.add_option("--hi", hi, "grid end");
  app.add_option("--points", points, "grid points");
  app.add_option("--noise", noise_name, "noise preset");
  CLI11_PARSE(app, argc, argv);

  try {
    if (points < 1) throw ConfigError("--points must be positive");
    HilbertConfig hc;
    hc.n_fock = n_fock;
    GkpStateSpec spec;
    spec.delta = delta;
    const NoiseModel noise = NoiseModel::from_name(noise_name);
    const VectorXcd psi = logical_state(LogicalLabel::plus_z, spec, hc);
    MatrixXcd qubit_g = MatrixXcd::Zero(2, 2);
    qubit_g(0, 0) = 1.0;
    const MatrixXcd rho0 = kron(MatrixXcd(psi * psi.adjoint()), qubit_g);
    const MatrixXcd z_op = pauli_operator('Z', spec.lattice, n_fock);
    const FeedbackPolicy policy = FeedbackPolicy::make_static();

    double best_alpha = 0.0;
    double best_fid = -1.0;
    for (int i = 0; i < points; ++i) {
      const double alpha =
          points == 1 ? lo : lo + (hi - lo) * double(i) / double(points - 1);
      SbsOptions opt;
      opt.alpha_l4 = alpha;
      SbsEngine eng(hc, noise, opt);
      const ExactTreeMetrics m =
          exact_tree_metrics(eng, policy, rho0, psi, z_op, half_cycles);
      std::printf("alpha % .4f  expected fidelity %.9f  expected z %.9f\n",
                  alpha, m.expected_return, m.expected_z);
      if (m.expected_return > best_fid) {
        best_fid = m.expected_return;
        best_alpha = alpha;
      }
    }
    std::printf("best alpha % .4f (expected fidelity %.9f)\n", best_alpha,
                best_fid);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
