#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "rndunit/tolerances.hpp"

namespace rndunit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest absolute entry; zero for an empty matrix.
double max_abs(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);

/// Hermitian d x d operator (energy units, hbar = 1).
class HermitianOperator {
 public:
  /// Validates squareness, finiteness and |A - A^dag|_max <= tol * max(1, |A|_max).
  /// The stored matrix is the exact Hermitian part (A + A^dag) / 2.
  explicit HermitianOperator(ComplexMatrix m, const Tolerances& tol = kDefaultTolerances);

  static HermitianOperator zero(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double s) const;

 private:
  struct Trusted {};
  HermitianOperator(Trusted, ComplexMatrix m) : matrix_(std::move(m)) {}

  ComplexMatrix matrix_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

class UnitaryOperator {
 public:
  /// Validates |U^dag U - 1|_max <= tol.unitary.
  explicit UnitaryOperator(ComplexMatrix m, const Tolerances& tol = kDefaultTolerances);

  static UnitaryOperator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// Hermitian, unit-trace, positive semidefinite state.
///
/// `DensityMatrix::unchecked` skips the positivity test. Master-equation
/// solutions go through it: the Redfield equation is not completely positive,
/// and its states are reported, not rejected.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, const Tolerances& tol = kDefaultTolerances);

  /// Checks shape and finiteness only; the matrix is symmetrized.
  static DensityMatrix unchecked(ComplexMatrix m);

  static DensityMatrix maximally_mixed(std::size_t dim);
  /// |psi><psi| for a (not necessarily normalized) nonzero vector.
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

 private:
  struct Trusted {};
  DensityMatrix(Trusted, ComplexMatrix m) : matrix_(std::move(m)) {}

  ComplexMatrix matrix_;
};

/// Ascending energies with the eigenvectors as columns of `basis`.
struct EigenSystem {
  RealVector energies;
  UnitaryOperator basis;

  std::size_t dim() const { return static_cast<std::size_t>(energies.size()); }
  /// basis^dag * A * basis
  ComplexMatrix to_eigenbasis(const ComplexMatrix& a) const;
  /// basis * A * basis^dag
  ComplexMatrix from_eigenbasis(const ComplexMatrix& a) const;
  /// Degeneracy threshold tol.degenerate * max(1, E_max - E_min).
  double degeneracy_threshold(const Tolerances& tol = kDefaultTolerances) const;
};

EigenSystem herm_eig(const HermitianOperator& h);

/// basis * diag(energies) * basis^dag
HermitianOperator reconstruct(const EigenSystem& eig);

/// e^{-itH} = basis * diag(e^{-itE_n}) * basis^dag.
UnitaryOperator propagator(const EigenSystem& eig, double t);
UnitaryOperator propagator(const HermitianOperator& h, double t);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out the second tensor factor: (rho_S)_{ij} = sum_k rho_{(i,k),(j,k)}.
DensityMatrix partial_trace_env(const DensityMatrix& rho_total, std::size_t dim_s,
                                std::size_t dim_e);
/// Same contraction on an arbitrary square matrix.
ComplexMatrix partial_trace_env(const ComplexMatrix& m, std::size_t dim_s, std::size_t dim_e);

/// Reorders a bipartite operator from A (x) B to B (x) A.
ComplexMatrix swap_factors(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b);

/// Half the trace norm of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// U rho U^dag
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho);

/// Scale-invariant test |[A, B]|_max <= tol.commutation * |A|_max * |B|_max.
bool commutes(const ComplexMatrix& a, const ComplexMatrix& b,
              const Tolerances& tol = kDefaultTolerances);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const ComplexMatrix& m);

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace rndunit
