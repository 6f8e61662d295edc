#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gkpqec {

using Complex = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown for malformed user input (bad config values, impossible requests).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a computation leaves its numerical validity domain
// (trace drift, negativity, forced branch of vanishing probability, ...).
// The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cavity truncation plus the two-level ancilla. Tensor order is always
// cavity (x) qubit, i.e. joint index = cavity_index * 2 + qubit_index.
struct HilbertConfig {
  int n_fock = 100;

  int joint_dim() const { return 2 * n_fock; }

  void validate() const {
    if (n_fock < 2) throw ConfigError("n_fock must be at least 2, got " + std::to_string(n_fock));
  }
};

inline constexpr int kQubitDim = 2;
inline constexpr int kOutcomeGround = 0;   // ancilla |g>, encoded +1 for policies
inline constexpr int kOutcomeExcited = 1;  // ancilla |e>, encoded -1 for policies

}  // namespace gkpqec
