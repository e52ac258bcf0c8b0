#pragma once

#include <cstddef>
#include <vector>

#include "rndunit/ensemble.hpp"
#include "rndunit/linops.hpp"

namespace rndunit {

/// Exact random unitary dynamics, three ways:
///
///  * Kraus form:       Lambda[rho] = sum_k K_k rho K_k^dag with K_k = sqrt(p_k) W_k
///  * ensemble average: sum_k p_k U_k(t) rho U_k(t)^dag, U_k(t) = e^{-it(H_S + H_k)}
///  * embedding:        a block-diagonal system+environment Hamiltonian acting on
///                      rho (x) diag(p), followed by a partial trace over the
///                      environment.
///
/// All three agree to rounding; the acceptance suite checks it.

/// Kraus elements sqrt(p_k) * W_k with sum_k K_k^dag K_k = 1.
class KrausChannel {
 public:
  /// Checks completeness to tol.unitary.
  explicit KrausChannel(std::vector<ComplexMatrix> terms,
                        const Tolerances& tol = kDefaultTolerances);

  std::size_t dim() const { return dim_; }
  const std::vector<ComplexMatrix>& terms() const { return terms_; }

 private:
  std::size_t dim_ = 0;
  std::vector<ComplexMatrix> terms_;
};

/// Largest d_S * d_E accepted by embed().
inline constexpr std::size_t kMaxEmbeddedDim = 4096;

/// System plus static environment, one environment level per realization.
class EmbeddedSystem {
 public:
  std::size_t dim_s() const { return dim_s_; }
  std::size_t dim_e() const { return weights_.size(); }
  const HermitianOperator& total_hamiltonian() const { return total_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Eigensystem of the total Hamiltonian, computed once in embed().
  const EigenSystem& eigensystem() const { return eig_; }

  /// Block k of the total Hamiltonian (d_S x d_S).
  ComplexMatrix block(std::size_t k) const;

 private:
  friend EmbeddedSystem embed(const HermitianOperator& hs, const DisorderEnsemble& e);
  EmbeddedSystem(std::size_t dim_s, HermitianOperator total, std::vector<double> weights,
                 EigenSystem eig)
      : dim_s_(dim_s), total_(std::move(total)), weights_(std::move(weights)),
        eig_(std::move(eig)) {}

  std::size_t dim_s_;
  HermitianOperator total_;
  std::vector<double> weights_;
  EigenSystem eig_;
};

DensityMatrix evolve_average(const HermitianOperator& hs, const DisorderEnsemble& e,
                             const DensityMatrix& rho0, double t);

/// evolve_average on a time grid; each realization is diagonalized once.
std::vector<DensityMatrix> evolve_average_series(const HermitianOperator& hs,
                                                 const DisorderEnsemble& e,
                                                 const DensityMatrix& rho0,
                                                 const std::vector<double>& times);

/// Block-diagonal total Hamiltonian with block k = hs + H_k, i.e. the
/// environment index is the slow one: row k * d_S + s. Rejects
/// d_S * d_E > kMaxEmbeddedDim.
EmbeddedSystem embed(const HermitianOperator& hs, const DisorderEnsemble& e);

/// Tr_E[U(t) (rho0_s (x) diag(p)) U(t)^dag], where U(t) is generated by the
/// full total Hamiltonian. The evolved joint state is reordered to
/// (system, environment) before partial_trace_env.
DensityMatrix evolve_embedded(const EmbeddedSystem& sys, const DensityMatrix& rho0_s, double t);

std::vector<DensityMatrix> evolve_embedded_series(const EmbeddedSystem& sys,
                                                  const DensityMatrix& rho0_s,
                                                  const std::vector<double>& times);

KrausChannel kraus_at(const HermitianOperator& hs, const DisorderEnsemble& e, double t);

DensityMatrix apply_kraus(const KrausChannel& k, const DensityMatrix& rho);

}  // namespace rndunit
