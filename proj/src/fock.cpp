#include "gkpqec/fock.hpp"

#include <cmath>
#include <mutex>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace gkpqec {

MatrixXcd annihilation_operator(int n_fock) {
  MatrixXcd a = MatrixXcd::Zero(n_fock, n_fock);
  for (int k = 1; k < n_fock; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

MatrixXcd creation_operator(int n_fock) { return annihilation_operator(n_fock).adjoint(); }

MatrixXcd number_operator(int n_fock) {
  MatrixXcd n = MatrixXcd::Zero(n_fock, n_fock);
  for (int k = 0; k < n_fock; ++k) n(k, k) = double(k);
  return n;
}

VectorXcd coherent_state(Complex gamma, int n_fock) {
  VectorXcd v(n_fock);
  v(0) = std::exp(-0.5 * std::norm(gamma));
  for (int k = 1; k < n_fock; ++k) v(k) = v(k - 1) * gamma / std::sqrt(double(k));
  return v;
}

namespace {

// Pade(13) scaling-and-squaring, Higham 2005. The lower-order branches for
// small norms keep the cheap cases cheap (2x2 rotations, short segments).
template <typename Mat>
Mat expm_impl(const Mat& a) {
  using Scalar = typename Mat::Scalar;
  const int n = int(a.rows());
  const Mat id = Mat::Identity(n, n);
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm

  auto pade = [&](const Mat& x, const std::vector<double>& b) {
    const Mat x2 = x * x;
    Mat u, v;
    if (b.size() == 14) {  // order 13
      const Mat x4 = x2 * x2;
      const Mat x6 = x4 * x2;
      u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 +
               b[1] * id);
      v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 +
          b[0] * id;
    } else {
      // V = sum_j b[2j] (x^2)^j, U = x sum_j b[2j+1] (x^2)^j
      Mat pow = id;
      Mat us = b[1] * id;
      v = b[0] * id;
      for (size_t j = 1; 2 * j < b.size(); ++j) {
        pow = Mat(pow * x2);
        v += b[2 * j] * pow;
        if (2 * j + 1 < b.size()) us += b[2 * j + 1] * pow;
      }
      u = x * us;
    }
    return Mat(Eigen::PartialPivLU<Mat>(v - u).solve(v + u));
  };

  static const std::vector<double> b3 = {120, 60, 12, 1};
  static const std::vector<double> b5 = {30240, 15120, 3360, 420, 30, 1};
  static const std::vector<double> b7 = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static const std::vector<double> b9 = {17643225600, 8821612800, 2075673600, 302702400, 30270240,
                                         2162160, 110880, 3960, 90, 1};
  static const std::vector<double> b13 = {64764752532480000.0,
                                          32382376266240000.0,
                                          7771770303897600.0,
                                          1187353796428800.0,
                                          129060195264000.0,
                                          10559470521600.0,
                                          670442572800.0,
                                          33522128640.0,
                                          1323241920.0,
                                          40840800.0,
                                          960960.0,
                                          16380.0,
                                          182.0,
                                          1.0};

  if (norm <= 1.495585217958292e-2) return pade(a, b3);
  if (norm <= 2.539398330063230e-1) return pade(a, b5);
  if (norm <= 9.504178996162932e-1) return pade(a, b7);
  if (norm <= 2.097847961257068e0) return pade(a, b9);

  const double theta13 = 5.371920351148152;
  int s = 0;
  double scaled = norm;
  while (scaled > theta13) {
    scaled *= 0.5;
    ++s;
  }
  Mat x = a * Scalar(std::ldexp(1.0, -s));
  Mat r = pade(x, b13);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

}  // namespace

MatrixXcd matrix_exponential(const MatrixXcd& m) {
  if (m.rows() != m.cols()) throw ConfigError("matrix_exponential requires a square matrix");
  return expm_impl<MatrixXcd>(m);
}

MatrixXd matrix_exponential(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("matrix_exponential requires a square matrix");
  return expm_impl<MatrixXd>(m);
}

MatrixXcd displacement_operator(Complex zeta, int n_fock) {
  if (std::norm(zeta) > 0.25 * n_fock) {
    detail::warn_once("displacement@" + std::to_string(n_fock),
                      "displacement amplitude |zeta|^2 = " + std::to_string(std::norm(zeta)) +
                          " is large for n_fock = " + std::to_string(n_fock) +
                          "; truncation error may be significant");
  }
  const MatrixXcd a = annihilation_operator(n_fock);
  return matrix_exponential(MatrixXcd(zeta * a.adjoint() - std::conj(zeta) * a));
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatrixXcd dissipator_apply(const MatrixXcd& collapse, const MatrixXcd& rho) {
  const MatrixXcd cd_c = collapse.adjoint() * collapse;
  return collapse * rho * collapse.adjoint() - 0.5 * (cd_c * rho + rho * cd_c);
}

MatrixXcd partial_trace_second(const MatrixXcd& rho, int dim_a, int dim_b) {
  if (rho.rows() != dim_a * dim_b || rho.cols() != dim_a * dim_b)
    throw ConfigError("partial_trace_second: dimension mismatch");
  MatrixXcd out = MatrixXcd::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j)
      for (int k = 0; k < dim_b; ++k) out(i, j) += rho(i * dim_b + k, j * dim_b + k);
  return out;
}

MatrixXcd sandwich_superoperator(const MatrixXcd& a, const MatrixXcd& b) {
  // vec(A rho B) = (B^T kron A) vec(rho) with column-major vec.
  return kron(MatrixXcd(b.transpose()), a);
}

MatrixXcd dissipator_superoperator(const MatrixXcd& collapse) {
  const int d = int(collapse.rows());
  const MatrixXcd id = MatrixXcd::Identity(d, d);
  const MatrixXcd cd_c = collapse.adjoint() * collapse;
  return sandwich_superoperator(collapse, collapse.adjoint()) -
         0.5 * sandwich_superoperator(cd_c, id) - 0.5 * sandwich_superoperator(id, cd_c);
}

bool is_hermitian(const MatrixXcd& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace detail {

void warn_once(const std::string& tag, const std::string& message) {
  static std::mutex mu;
  static std::set<std::string> seen;
  std::lock_guard<std::mutex> lock(mu);
  if (seen.insert(tag).second) std::fprintf(stderr, "[gkpqec] warning: %s\n", message.c_str());
}

}  // namespace detail

}  // namespace gkpqec
