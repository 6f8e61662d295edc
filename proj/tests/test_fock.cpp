#include <doctest.h>

#include <random>

#include "gkpqec/fock.hpp"

using namespace gkpqec;

namespace {

MatrixXcd random_complex(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(u(rng), u(rng));
  return m;
}

MatrixXcd random_density(int n, unsigned seed) {
  const MatrixXcd g = random_complex(n, n, seed);
  MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

VectorXcd vec_colmajor(const MatrixXcd& m) {
  return Eigen::Map<const VectorXcd>(m.data(), m.size());
}

}  // namespace

TEST_CASE("ladder operators act as sqrt factors") {
  const int n = 8;
  const MatrixXcd a = annihilation_operator(n);
  const MatrixXcd ad = creation_operator(n);
  CHECK((ad - a.adjoint()).norm() == doctest::Approx(0.0));
  for (int k = 1; k < n; ++k) {
    VectorXcd fock = VectorXcd::Zero(n);
    fock(k) = 1.0;
    const VectorXcd lowered = a * fock;
    CHECK(std::abs(lowered(k - 1) - std::sqrt(double(k))) < 1e-14);
  }
  const MatrixXcd commutator = a * ad - ad * a;
  // identity except the truncation corner
  for (int i = 0; i < n - 1; ++i)
    CHECK(std::abs(commutator(i, i) - 1.0) < 1e-14);
  CHECK(std::abs(commutator(n - 1, n - 1) + double(n - 1)) < 1e-12);
  CHECK((number_operator(n) - ad * a).norm() < 1e-12);
}

TEST_CASE("coherent state statistics") {
  const Complex g(0.7, -0.4);
  const int n = 40;
  const VectorXcd psi = coherent_state(g, n);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const MatrixXcd a = annihilation_operator(n);
  const Complex amean = (psi.adjoint() * a * psi)(0);
  CHECK(std::abs(amean - g) < 1e-10);
  const double nbar = (psi.adjoint() * number_operator(n) * psi)(0).real();
  CHECK(nbar == doctest::Approx(std::norm(g)).epsilon(1e-10));
}

TEST_CASE("matrix exponential against closed forms") {
  MatrixXcd nilpotent = MatrixXcd::Zero(2, 2);
  nilpotent(0, 1) = 3.0;
  const MatrixXcd en = matrix_exponential(nilpotent);
  CHECK(std::abs(en(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(en(0, 1) - 3.0) < 1e-14);

  // exp(i theta sigma_y) rotation block
  const double theta = 0.8;
  MatrixXcd sy = MatrixXcd::Zero(2, 2);
  sy(0, 1) = Complex(0.0, -1.0);
  sy(1, 0) = Complex(0.0, 1.0);
  const MatrixXcd rot = matrix_exponential(MatrixXcd(Complex(0.0, 1.0) * theta * sy));
  CHECK(std::abs(rot(0, 0) - std::cos(theta)) < 1e-14);
  CHECK(std::abs(rot(0, 1) - std::sin(theta)) < 1e-14);

  // exp(A) exp(-A) = I for a sizeable random matrix (exercises squaring)
  const MatrixXcd m = 3.0 * random_complex(12, 12, 71);
  const MatrixXcd prod = matrix_exponential(m) * matrix_exponential(MatrixXcd(-m));
  CHECK((prod - MatrixXcd::Identity(12, 12)).norm() < 1e-9);

  // real overload: det(exp(A)) = exp(tr A)
  MatrixXd r(3, 3);
  r << 0.2, -0.5, 0.1, 0.4, 0.3, -0.2, -0.1, 0.6, -0.4;
  CHECK(matrix_exponential(r).determinant() ==
        doctest::Approx(std::exp(r.trace())).epsilon(1e-12));
}

TEST_CASE("displacement operator properties") {
  const int n = 60;
  const Complex z(0.9, 0.35);
  const MatrixXcd d = displacement_operator(z, n);
  CHECK((d * d.adjoint() - MatrixXcd::Identity(n, n)).norm() < 1e-10);

  // D(z)|0> is the coherent state |z>
  VectorXcd vac = VectorXcd::Zero(n);
  vac(0) = 1.0;
  const VectorXcd disp = d * vac;
  const VectorXcd coh = coherent_state(z, n);
  CHECK((disp - coh).norm() < 1e-10);

  // composition phase: D(a) D(b) = exp((a conj(b) - conj(a) b)/2) D(a+b).
  // Rows and columns near the cutoff carry O(1) truncation error, so compare
  // the interior block only.
  const Complex a(0.4, -0.2), b(-0.3, 0.5);
  const MatrixXcd lhs = displacement_operator(a, n) * displacement_operator(b, n);
  const Complex phase = std::exp((a * std::conj(b) - std::conj(a) * b) / 2.0);
  const MatrixXcd rhs = phase * displacement_operator(a + b, n);
  CHECK((lhs - rhs).topLeftCorner(40, 40).norm() < 1e-12);
}

TEST_CASE("kron layout") {
  MatrixXcd a(2, 2), b(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  b << 0.0, 1.0, 1.0, 0.0;
  const MatrixXcd k = kron(a, b);
  REQUIRE(k.rows() == 4);
  CHECK(std::abs(k(0, 1) - 1.0) < 1e-15);  // a(0,0) * b(0,1)
  CHECK(std::abs(k(0, 3) - 2.0) < 1e-15);  // a(0,1) * b(0,1)
  CHECK(std::abs(k(2, 1) - 3.0) < 1e-15);  // a(1,0) * b(1,0) block layout
  const MatrixXcd left = random_complex(3, 3, 5);
  const MatrixXcd right = random_complex(2, 2, 6);
  CHECK(std::abs(kron(left, right).trace() - left.trace() * right.trace()) < 1e-13);
}

TEST_CASE("dissipator matches its superoperator matrix") {
  const int n = 5;
  const MatrixXcd collapse = random_complex(n, n, 17);
  const MatrixXcd rho = random_density(n, 18);
  const MatrixXcd direct = dissipator_apply(collapse, rho);
  const MatrixXcd super = dissipator_superoperator(collapse);
  const VectorXcd mapped = super * vec_colmajor(rho);
  const MatrixXcd back = Eigen::Map<const MatrixXcd>(mapped.data(), n, n);
  CHECK((direct - back).norm() < 1e-12);
  CHECK(std::abs(direct.trace()) < 1e-12);  // trace preserving generator
}

TEST_CASE("sandwich superoperator is vec of A rho B") {
  const int n = 4;
  const MatrixXcd a = random_complex(n, n, 21);
  const MatrixXcd b = random_complex(n, n, 22);
  const MatrixXcd rho = random_complex(n, n, 23);
  const VectorXcd lhs = sandwich_superoperator(a, b) * vec_colmajor(rho);
  const MatrixXcd rhs = a * rho * b;
  CHECK((lhs - vec_colmajor(rhs)).norm() < 1e-13);
}

TEST_CASE("partial trace over the second factor") {
  const MatrixXcd a = random_density(3, 31);
  const MatrixXcd b = random_density(2, 32);
  const MatrixXcd joint = kron(a, b);
  const MatrixXcd reduced = partial_trace_second(joint, 3, 2);
  CHECK((reduced - a).norm() < 1e-12);
}

TEST_CASE("hermiticity helpers") {
  MatrixXcd h = random_complex(4, 4, 41);
  h = (h + h.adjoint()).eval();
  CHECK(is_hermitian(h));
  MatrixXcd nh = h;
  nh(0, 1) += Complex(0.0, 1e-3);
  CHECK(!is_hermitian(nh, 1e-6));
  const MatrixXcd psd = h * h.adjoint();
  CHECK(min_eigenvalue(psd) >= -1e-10);
}
