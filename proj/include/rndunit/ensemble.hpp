#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rndunit/linops.hpp"

namespace rndunit {

struct Realization {
  HermitianOperator hamiltonian;
  double weight;
};

/// Finite disorder ensemble {(H_lambda, p_lambda)}: the discretized p(lambda).
///
/// Weights are nonnegative and sum to one; every Hamiltonian has the same
/// dimension. Continuous distributions enter through quadrature rules.
class DisorderEnsemble {
 public:
  explicit DisorderEnsemble(std::vector<Realization> realizations,
                            const Tolerances& tol = kDefaultTolerances);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return realizations_.size(); }
  const std::vector<Realization>& realizations() const { return realizations_; }
  const Realization& operator[](std::size_t k) const { return realizations_[k]; }

  std::vector<double> weights() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Realization> realizations_;
};

/// An ensemble with zero weighted mean together with the mean that was removed.
struct CenteredEnsemble {
  HermitianOperator mean;
  DisorderEnsemble ensemble;
};

HermitianOperator mean_hamiltonian(const DisorderEnsemble& e);

/// H_lambda -> H_lambda - mean. The mean belongs in the system Hamiltonian;
/// hs + mean + (H_lambda - mean) leaves every block hs + H_lambda unchanged.
CenteredEnsemble center(const DisorderEnsemble& e);

/// True when |sum_k p_k H_k|_max <= tol.hermitian * max(1, scale).
bool has_zero_mean(const DisorderEnsemble& e, double scale = 1.0,
                   const Tolerances& tol = kDefaultTolerances);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for the weight e^{-x^2} (Golub-Welsch).
/// Nodes ascending; weights sum to sqrt(pi).
QuadratureRule gauss_hermite_rule(std::size_t n_nodes);

/// Discretizes lambda ~ N(0, sigma^2) into {(lambda_k * base, w_k)} with
/// lambda_k = sigma * sqrt(2) * x_k and w_k = v_k / sqrt(pi).
DisorderEnsemble gauss_hermite_ensemble(const HermitianOperator& base, double sigma,
                                        std::size_t n_nodes);

/// {(+g base, 1/2), (-g base, 1/2)}.
DisorderEnsemble two_point_ensemble(const HermitianOperator& base, double g);

/// Seeded Monte-Carlo draw of n_samples equally weighted realizations
/// lambda * base with lambda ~ N(0, sigma^2). Cross-check path only.
DisorderEnsemble monte_carlo_gaussian_ensemble(const HermitianOperator& base, double sigma,
                                               std::size_t n_samples, std::uint64_t seed);

/// Two-point correlation C_2(n, m) = sum_lambda p_lambda (E_n^lambda - E_m^lambda)^2,
/// where E_n^lambda = <n|H_lambda|n> in the eigenbasis `eig` of the system
/// Hamiltonian. Every H_lambda must commute with that Hamiltonian and be
/// diagonal inside its degenerate subspaces; otherwise PreconditionError
/// names the offending index.
double c2(const DisorderEnsemble& e, const EigenSystem& eig, std::size_t n, std::size_t m,
          const Tolerances& tol = kDefaultTolerances);

/// Checks the precondition of c2 for every realization (throws on failure).
void require_spectral_disorder(const DisorderEnsemble& e, const EigenSystem& eig,
                               const Tolerances& tol = kDefaultTolerances);

}  // namespace rndunit
