#include "rndunit/channel.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "rndunit/error.hpp"
#include "rndunit/parallel.hpp"

namespace rndunit {

namespace {

void require_dims(const HermitianOperator& hs, const DisorderEnsemble& e, const char* what) {
  if (hs.dim() != e.dim()) {
    throw ValidationError(std::string(what) + ": system Hamiltonian has dimension " +
                          std::to_string(hs.dim()) + " but the ensemble has dimension " +
                          std::to_string(e.dim()));
  }
}

void require_state_dim(std::size_t expected, const DensityMatrix& rho, const char* what) {
  if (rho.dim() != expected) {
    throw ValidationError(std::string(what) + ": state has dimension " +
                          std::to_string(rho.dim()) + ", expected " + std::to_string(expected));
  }
}

double flops_per_realization(std::size_t d) {
  const double n = static_cast<double>(d);
  return 40.0 * n * n * n;
}

std::vector<EigenSystem> diagonalize_blocks(const HermitianOperator& hs,
                                            const DisorderEnsemble& e) {
  std::vector<std::optional<EigenSystem>> slots(e.size());
  parallel_for(
      e.size(), [&](std::size_t k) { slots[k] = herm_eig(hs + e[k].hamiltonian); },
      flops_per_realization(hs.dim()));
  std::vector<EigenSystem> out;
  out.reserve(e.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// sum_k p_k U_k rho U_k^dag, accumulated in realization order.
ComplexMatrix weighted_conjugation_sum(const std::vector<EigenSystem>& blocks,
                                       const std::vector<double>& weights,
                                       const ComplexMatrix& rho, double t) {
  std::vector<ComplexMatrix> terms(blocks.size());
  parallel_for(
      blocks.size(),
      [&](std::size_t k) {
        terms[k] = weights[k] * conjugate(propagator(blocks[k], t).matrix(), rho);
      },
      flops_per_realization(static_cast<std::size_t>(rho.rows())));
  ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& term : terms) acc += term;
  return acc;
}

}  // namespace

KrausChannel::KrausChannel(std::vector<ComplexMatrix> terms, const Tolerances& tol)
    : terms_(std::move(terms)) {
  if (terms_.empty()) throw ValidationError("KrausChannel: at least one term is required");
  const auto n = terms_.front().rows();
  if (n == 0) throw ValidationError("KrausChannel: terms must be non-empty square matrices");
  ComplexMatrix completeness = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    if (term.rows() != n || term.cols() != n) {
      throw ValidationError("KrausChannel: term " + std::to_string(k) + " has wrong shape");
    }
    completeness += term.adjoint() * term;
  }
  const double defect = max_abs(completeness - ComplexMatrix::Identity(n, n));
  if (defect > tol.unitary) {
    throw ValidationError("KrausChannel: completeness violated (|sum K^dag K - 1|_max = " +
                          std::to_string(defect) + ")");
  }
  dim_ = static_cast<std::size_t>(n);
}

ComplexMatrix EmbeddedSystem::block(std::size_t k) const {
  const auto d = static_cast<Eigen::Index>(dim_s_);
  const auto offset = static_cast<Eigen::Index>(k) * d;
  return total_.matrix().block(offset, offset, d, d);
}

DensityMatrix evolve_average(const HermitianOperator& hs, const DisorderEnsemble& e,
                             const DensityMatrix& rho0, double t) {
  return evolve_average_series(hs, e, rho0, {t}).front();
}

std::vector<DensityMatrix> evolve_average_series(const HermitianOperator& hs,
                                                 const DisorderEnsemble& e,
                                                 const DensityMatrix& rho0,
                                                 const std::vector<double>& times) {
  require_dims(hs, e, "evolve_average");
  require_state_dim(hs.dim(), rho0, "evolve_average");
  const auto blocks = diagonalize_blocks(hs, e);
  const auto weights = e.weights();
  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  for (double t : times) {
    out.emplace_back(weighted_conjugation_sum(blocks, weights, rho0.matrix(), t));
  }
  return out;
}

EmbeddedSystem embed(const HermitianOperator& hs, const DisorderEnsemble& e) {
  require_dims(hs, e, "embed");
  const std::size_t total_dim = hs.dim() * e.size();
  if (total_dim > kMaxEmbeddedDim) {
    throw ValidationError("embed: joint dimension " + std::to_string(total_dim) +
                          " exceeds the limit of " + std::to_string(kMaxEmbeddedDim));
  }
  const auto n = static_cast<Eigen::Index>(total_dim);
  const auto d = static_cast<Eigen::Index>(hs.dim());
  ComplexMatrix total = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < e.size(); ++k) {
    const auto offset = static_cast<Eigen::Index>(k) * d;
    total.block(offset, offset, d, d) = (hs + e[k].hamiltonian).matrix();
  }
  HermitianOperator total_h(std::move(total));
  EigenSystem eig = herm_eig(total_h);
  return EmbeddedSystem(hs.dim(), std::move(total_h), e.weights(), std::move(eig));
}

DensityMatrix evolve_embedded(const EmbeddedSystem& sys, const DensityMatrix& rho0_s, double t) {
  return evolve_embedded_series(sys, rho0_s, {t}).front();
}

std::vector<DensityMatrix> evolve_embedded_series(const EmbeddedSystem& sys,
                                                  const DensityMatrix& rho0_s,
                                                  const std::vector<double>& times) {
  require_state_dim(sys.dim_s(), rho0_s, "evolve_embedded");
  const auto de = static_cast<Eigen::Index>(sys.dim_e());
  Eigen::VectorXcd p(de);
  for (Eigen::Index k = 0; k < de; ++k) p(k) = sys.weights()[static_cast<std::size_t>(k)];
  const ComplexMatrix env_state = p.asDiagonal().toDenseMatrix();
  // Joint initial state in the environment-major ordering of the Hamiltonian.
  const ComplexMatrix joint0 = kron(env_state, rho0_s.matrix());

  const EigenSystem& eig = sys.eigensystem();
  const ComplexMatrix& v = eig.basis.matrix();
  const ComplexMatrix joint0_eb = v.adjoint() * joint0 * v;
  const auto n = joint0_eb.rows();

  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t)) throw ValidationError("evolve_embedded: time must be finite");
    Eigen::VectorXcd phase(n);
    for (Eigen::Index a = 0; a < n; ++a) phase(a) = std::exp(-kI * (t * eig.energies(a)));
    const ComplexMatrix evolved_eb = phase.asDiagonal() * joint0_eb * phase.conjugate().asDiagonal();
    const ComplexMatrix joint = v * evolved_eb * v.adjoint();
    const ComplexMatrix system_major = swap_factors(joint, sys.dim_e(), sys.dim_s());
    out.emplace_back(partial_trace_env(system_major, sys.dim_s(), sys.dim_e()));
  }
  return out;
}

KrausChannel kraus_at(const HermitianOperator& hs, const DisorderEnsemble& e, double t) {
  require_dims(hs, e, "kraus_at");
  const auto blocks = diagonalize_blocks(hs, e);
  std::vector<ComplexMatrix> terms;
  terms.reserve(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    terms.push_back(std::sqrt(e[k].weight) * propagator(blocks[k], t).matrix());
  }
  return KrausChannel(std::move(terms));
}

DensityMatrix apply_kraus(const KrausChannel& k, const DensityMatrix& rho) {
  require_state_dim(k.dim(), rho, "apply_kraus");
  ComplexMatrix acc = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& term : k.terms()) acc += conjugate(term, rho.matrix());
  return DensityMatrix(std::move(acc));
}

}  // namespace rndunit
