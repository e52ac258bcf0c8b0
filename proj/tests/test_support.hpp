#pragma once

// Seeded generators and brute-force oracles shared by the test suites. Nothing
// here calls into the code paths under test beyond the basic value types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rndunit/linops.hpp"

namespace rndunit::testing {

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(u(rng), u(rng));
  return m;
}

inline HermitianOperator random_hermitian(std::mt19937_64& rng, Eigen::Index d,
                                          double scale = 1.0) {
  const ComplexMatrix a = random_matrix(rng, d, scale);
  return HermitianOperator(0.5 * (a + a.adjoint()));
}

inline DensityMatrix random_state(std::mt19937_64& rng, Eigen::Index d) {
  const ComplexMatrix a = random_matrix(rng, d);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

inline DensityMatrix random_pure_state(std::mt19937_64& rng, Eigen::Index d) {
  return DensityMatrix::pure(random_matrix(rng, d).col(0));
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index d) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, d));
  return qr.householderQ() * ComplexMatrix::Identity(d, d);
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = u(rng));
  for (auto& x : w) x /= total;
  return w;
}

inline ComplexMatrix ket_bra(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

/// e^{-itH} by a Taylor series with scaling and squaring; independent of the
/// eigendecomposition route.
inline ComplexMatrix taylor_expm(const ComplexMatrix& h, double t) {
  const ComplexMatrix a = Complex(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 0.25) ++squarings;
  const ComplexMatrix scaled = a / std::ldexp(1.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(h.rows(), h.cols());
  ComplexMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = (term * scaled / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

/// int_0^t ds e^{-isH} A e^{isH} by the composite trapezoid rule.
inline ComplexMatrix trapezoid_h_tilde(const ComplexMatrix& hs, const ComplexMatrix& a, double t,
                                       int steps) {
  const double h = t / steps;
  const ComplexMatrix step = taylor_expm(hs, h);
  ComplexMatrix u = ComplexMatrix::Identity(hs.rows(), hs.cols());
  ComplexMatrix acc = 0.5 * a;
  for (int k = 1; k <= steps; ++k) {
    u = (step * u).eval();
    const ComplexMatrix f = u * a * u.adjoint();
    acc += (k == steps ? 0.5 : 1.0) * f;
  }
  return h * acc;
}

}  // namespace rndunit::testing
