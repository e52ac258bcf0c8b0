#include "rndunit/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rndunit/error.hpp"

namespace rndunit {

DisorderEnsemble::DisorderEnsemble(std::vector<Realization> realizations, const Tolerances& tol)
    : realizations_(std::move(realizations)) {
  if (realizations_.empty()) {
    throw ValidationError("DisorderEnsemble: at least one realization is required");
  }
  dim_ = realizations_.front().hamiltonian.dim();
  double total = 0.0;
  for (std::size_t k = 0; k < realizations_.size(); ++k) {
    const auto& r = realizations_[k];
    if (r.hamiltonian.dim() != dim_) {
      throw ValidationError("DisorderEnsemble: realization " + std::to_string(k) +
                            " has dimension " + std::to_string(r.hamiltonian.dim()) +
                            ", expected " + std::to_string(dim_));
    }
    if (!std::isfinite(r.weight) || r.weight < 0.0) {
      throw ValidationError("DisorderEnsemble: weight of realization " + std::to_string(k) +
                            " must be a finite nonnegative number");
    }
    total += r.weight;
  }
  if (std::abs(total - 1.0) > tol.weights) {
    throw ValidationError("DisorderEnsemble: weights must sum to 1 (sum = " +
                          std::to_string(total) + ")");
  }
}

std::vector<double> DisorderEnsemble::weights() const {
  std::vector<double> w;
  w.reserve(realizations_.size());
  for (const auto& r : realizations_) w.push_back(r.weight);
  return w;
}

HermitianOperator mean_hamiltonian(const DisorderEnsemble& e) {
  HermitianOperator mean = HermitianOperator::zero(e.dim());
  for (const auto& r : e.realizations()) mean = mean + r.weight * r.hamiltonian;
  return mean;
}

CenteredEnsemble center(const DisorderEnsemble& e) {
  HermitianOperator mean = mean_hamiltonian(e);
  std::vector<Realization> shifted;
  shifted.reserve(e.size());
  for (const auto& r : e.realizations()) shifted.push_back({r.hamiltonian - mean, r.weight});
  return CenteredEnsemble{std::move(mean), DisorderEnsemble(std::move(shifted))};
}

bool has_zero_mean(const DisorderEnsemble& e, double scale, const Tolerances& tol) {
  return max_abs(mean_hamiltonian(e).matrix()) <= tol.hermitian * std::max(1.0, scale);
}

QuadratureRule gauss_hermite_rule(std::size_t n_nodes) {
  if (n_nodes == 0) throw ValidationError("gauss_hermite_rule: n_nodes must be >= 1");
  const auto n = static_cast<Eigen::Index>(n_nodes);
  // Jacobi matrix of the physicists' Hermite polynomials: zero diagonal,
  // off-diagonal sqrt(k / 2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("gauss_hermite_rule: tridiagonal eigensolver did not converge");
  }

  QuadratureRule rule;
  rule.nodes.resize(n_nodes);
  rule.weights.resize(n_nodes);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    rule.weights[static_cast<std::size_t>(k)] = std::sqrt(std::numbers::pi) * v0 * v0;
  }
  // The rule is symmetric about zero; enforce it so odd moments vanish exactly.
  for (std::size_t k = 0; k < n_nodes / 2; ++k) {
    const std::size_t mirror = n_nodes - 1 - k;
    const double x = 0.5 * (rule.nodes[mirror] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[mirror] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[mirror] = x;
    rule.weights[k] = w;
    rule.weights[mirror] = w;
  }
  if (n_nodes % 2 == 1) rule.nodes[n_nodes / 2] = 0.0;
  return rule;
}

DisorderEnsemble gauss_hermite_ensemble(const HermitianOperator& base, double sigma,
                                        std::size_t n_nodes) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("gauss_hermite_ensemble: sigma must be positive and finite");
  }
  const QuadratureRule rule = gauss_hermite_rule(n_nodes);
  double total = 0.0;
  for (double v : rule.weights) total += v;

  std::vector<Realization> realizations;
  realizations.reserve(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const double lambda = sigma * std::numbers::sqrt2 * rule.nodes[k];
    // v_k / sqrt(pi), normalized against the computed total to absorb rounding.
    realizations.push_back({lambda * base, rule.weights[k] / total});
  }
  return DisorderEnsemble(std::move(realizations));
}

DisorderEnsemble two_point_ensemble(const HermitianOperator& base, double g) {
  if (!std::isfinite(g)) throw ValidationError("two_point_ensemble: g must be finite");
  return DisorderEnsemble({{g * base, 0.5}, {-g * base, 0.5}});
}

DisorderEnsemble monte_carlo_gaussian_ensemble(const HermitianOperator& base, double sigma,
                                               std::size_t n_samples, std::uint64_t seed) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("monte_carlo_gaussian_ensemble: sigma must be positive and finite");
  }
  if (n_samples == 0) {
    throw ValidationError("monte_carlo_gaussian_ensemble: n_samples must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<Realization> realizations;
  realizations.reserve(n_samples);
  const double w = 1.0 / static_cast<double>(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) realizations.push_back({normal(rng) * base, w});
  return DisorderEnsemble(std::move(realizations));
}

void require_spectral_disorder(const DisorderEnsemble& e, const EigenSystem& eig,
                               const Tolerances& tol) {
  if (e.dim() != eig.dim()) {
    throw ValidationError("spectral disorder check: ensemble dimension " +
                          std::to_string(e.dim()) + " does not match eigensystem dimension " +
                          std::to_string(eig.dim()));
  }
  const HermitianOperator hs = reconstruct(eig);
  const double gap_tol = eig.degeneracy_threshold(tol);
  const auto d = static_cast<Eigen::Index>(eig.dim());
  for (std::size_t k = 0; k < e.size(); ++k) {
    const ComplexMatrix& h = e[k].hamiltonian.matrix();
    if (!commutes(h, hs.matrix(), tol)) {
      throw PreconditionError("realization " + std::to_string(k) +
                              " does not commute with the system Hamiltonian");
    }
    // Inside a degenerate subspace commutation does not force diagonality;
    // the shared-eigenbasis energies are then ill-defined.
    const ComplexMatrix he = eig.to_eigenbasis(h);
    const double off_tol = tol.commutation * std::max(1.0, max_abs(h));
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i + 1; j < d; ++j) {
        if (std::abs(eig.energies(j) - eig.energies(i)) <= gap_tol &&
            std::abs(he(i, j)) > off_tol) {
          throw PreconditionError("realization " + std::to_string(k) +
                                  " is not diagonal in the degenerate eigenbasis of the system "
                                  "Hamiltonian");
        }
      }
    }
  }
}

double c2(const DisorderEnsemble& e, const EigenSystem& eig, std::size_t n, std::size_t m,
          const Tolerances& tol) {
  if (n >= eig.dim() || m >= eig.dim()) {
    throw ValidationError("c2: level index out of range");
  }
  require_spectral_disorder(e, eig, tol);
  if (n == m) return 0.0;
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  const Eigen::VectorXcd vn = eig.basis.matrix().col(ni);
  const Eigen::VectorXcd vm = eig.basis.matrix().col(mi);
  double acc = 0.0;
  for (const auto& r : e.realizations()) {
    const double en = vn.dot(r.hamiltonian.matrix() * vn).real();
    const double em = vm.dot(r.hamiltonian.matrix() * vm).real();
    acc += r.weight * (en - em) * (en - em);
  }
  return acc;
}

}  // namespace rndunit
