#include "rndunit/linops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rndunit/error.hpp"

namespace rndunit {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": expected a non-empty square matrix, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) {
    throw ValidationError(std::string(what) + ": matrix has non-finite entries");
  }
}

double hermiticity_defect(const ComplexMatrix& m) { return max_abs(m - m.adjoint()); }

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

double max_abs(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

HermitianOperator::HermitianOperator(ComplexMatrix m, const Tolerances& tol) {
  require_square(m, "HermitianOperator");
  require_finite(m, "HermitianOperator");
  const double defect = hermiticity_defect(m);
  if (defect > tol.hermitian * std::max(1.0, max_abs(m))) {
    throw ValidationError("HermitianOperator: matrix is not Hermitian (|A - A^dag|_max = " +
                          std::to_string(defect) + ")");
  }
  matrix_ = hermitian_part(m);
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
  if (dim == 0) throw ValidationError("HermitianOperator: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  return HermitianOperator(Trusted{}, ComplexMatrix::Zero(n, n));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw ValidationError("HermitianOperator: dimension mismatch in +");
  return HermitianOperator(Trusted{}, matrix_ + other.matrix_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw ValidationError("HermitianOperator: dimension mismatch in -");
  return HermitianOperator(Trusted{}, matrix_ - other.matrix_);
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(Trusted{}, matrix_ * s);
}

// ---------------------------------------------------------------------------

UnitaryOperator::UnitaryOperator(ComplexMatrix m, const Tolerances& tol) {
  require_square(m, "UnitaryOperator");
  require_finite(m, "UnitaryOperator");
  const auto n = m.rows();
  const double defect = max_abs(m.adjoint() * m - ComplexMatrix::Identity(n, n));
  if (defect > tol.unitary) {
    throw ValidationError("UnitaryOperator: |U^dag U - 1|_max = " + std::to_string(defect));
  }
  matrix_ = std::move(m);
}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return UnitaryOperator(ComplexMatrix::Identity(n, n));
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(ComplexMatrix m, const Tolerances& tol) {
  require_square(m, "DensityMatrix");
  require_finite(m, "DensityMatrix");
  const double defect = hermiticity_defect(m);
  if (defect > tol.hermitian) {
    throw ValidationError("DensityMatrix: matrix is not Hermitian (|A - A^dag|_max = " +
                          std::to_string(defect) + ")");
  }
  const double trace_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_err > tol.trace) {
    throw ValidationError("DensityMatrix: trace must be 1 (off by " + std::to_string(trace_err) +
                          ")");
  }
  m = hermitian_part(m);
  const double lowest = min_eigenvalue(m);
  if (lowest < -tol.positivity) {
    throw ValidationError("DensityMatrix: matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(lowest) + ")");
  }
  matrix_ = std::move(m);
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) {
  require_square(m, "DensityMatrix");
  require_finite(m, "DensityMatrix");
  return DensityMatrix(Trusted{}, hermitian_part(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw ValidationError("DensityMatrix: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Trusted{}, ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (psi.size() == 0 || !(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("DensityMatrix::pure: state vector must be nonzero and finite");
  }
  const Eigen::VectorXcd v = psi / norm;
  return DensityMatrix(Trusted{}, hermitian_part(v * v.adjoint()));
}

// ---------------------------------------------------------------------------

ComplexMatrix EigenSystem::to_eigenbasis(const ComplexMatrix& a) const {
  return basis.matrix().adjoint() * a * basis.matrix();
}

ComplexMatrix EigenSystem::from_eigenbasis(const ComplexMatrix& a) const {
  return basis.matrix() * a * basis.matrix().adjoint();
}

double EigenSystem::degeneracy_threshold(const Tolerances& tol) const {
  const double span = energies.size() > 0 ? energies.maxCoeff() - energies.minCoeff() : 0.0;
  return tol.degenerate * std::max(1.0, span);
}

EigenSystem herm_eig(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("herm_eig: eigensolver did not converge");
  }
  return EigenSystem{solver.eigenvalues(), UnitaryOperator(solver.eigenvectors())};
}

HermitianOperator reconstruct(const EigenSystem& eig) {
  const ComplexMatrix& v = eig.basis.matrix();
  const Eigen::VectorXcd e = eig.energies.cast<Complex>();
  return HermitianOperator(v * e.asDiagonal() * v.adjoint());
}

UnitaryOperator propagator(const EigenSystem& eig, double t) {
  if (!std::isfinite(t)) throw ValidationError("propagator: time must be finite");
  Eigen::VectorXcd phases(eig.energies.size());
  for (Eigen::Index n = 0; n < phases.size(); ++n) {
    phases(n) = std::exp(-kI * (t * eig.energies(n)));
  }
  const ComplexMatrix& v = eig.basis.matrix();
  return UnitaryOperator(v * phases.asDiagonal() * v.adjoint());
}

UnitaryOperator propagator(const HermitianOperator& h, double t) {
  return propagator(herm_eig(h), t);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace_env(const ComplexMatrix& m, std::size_t dim_s, std::size_t dim_e) {
  const auto ds = static_cast<Eigen::Index>(dim_s);
  const auto de = static_cast<Eigen::Index>(dim_e);
  if (dim_s == 0 || dim_e == 0 || m.rows() != ds * de || m.cols() != ds * de) {
    throw ValidationError("partial_trace_env: matrix is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected dim_s*dim_e = " +
                          std::to_string(dim_s * dim_e));
  }
  ComplexMatrix out = ComplexMatrix::Zero(ds, ds);
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index k = 0; k < de; ++k) acc += m(i * de + k, j * de + k);
      out(i, j) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace_env(const DensityMatrix& rho_total, std::size_t dim_s,
                                std::size_t dim_e) {
  return DensityMatrix(partial_trace_env(rho_total.matrix(), dim_s, dim_e));
}

ComplexMatrix swap_factors(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b) {
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (m.rows() != da * db || m.cols() != da * db) {
    throw ValidationError("swap_factors: matrix is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " +
                          std::to_string(dim_a * dim_b));
  }
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < db; ++b)
      for (Eigen::Index a2 = 0; a2 < da; ++a2)
        for (Eigen::Index b2 = 0; b2 < db; ++b2)
          out(b * da + a, b2 * da + a2) = m(a * db + b, a2 * db + b2);
  return out;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("trace_distance: dimension mismatch");
  }
  const ComplexMatrix diff = a - b;
  if (hermiticity_defect(diff) == 0.0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(diff, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(diff);
  return 0.5 * svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ValidationError("commutator: operands must be square with equal dimensions");
  }
  return a * b - b * a;
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return u * rho * u.adjoint();
}

bool commutes(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerances& tol) {
  return max_abs(commutator(a, b)) <= tol.commutation * max_abs(a) * max_abs(b);
}

double min_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

}  // namespace rndunit
