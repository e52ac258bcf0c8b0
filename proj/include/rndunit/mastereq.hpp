#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rndunit/ensemble.hpp"
#include "rndunit/linops.hpp"

namespace rndunit {

// Master equations for the reduced dynamics of a system coupled to a static
// environment, in the Schroedinger picture with hbar = 1:
//
//   drho/dt = -i[H_S, rho] - sum_k p_k [H_k, [Htilde_k(t), rho]]
//
// with Htilde_k(t) = int_0^t ds e^{-isH_S} H_k e^{isH_S} (Redfield). The
// dephasing generator uses Htilde_k = t H_k (exact when every H_k commutes
// with H_S); the GKSL generator replaces the integral by its t -> infinity
// limit, expressed through resolvent matrix elements.

struct Redfield {};
struct Dephasing {};
struct Gksl {
  double epsilon = 0.0;
};

using GeneratorKind = std::variant<Redfield, Dephasing, Gksl>;

std::string generator_name(const GeneratorKind& kind);

/// Everything a generator needs, validated once.
///
/// The ensemble must already be centered (zero weighted mean); it is checked,
/// not silently centered. Dephasing problems must have every realization
/// commuting with hs. GKSL problems precompute the resolvent and fail here on
/// a degenerate spectrum with epsilon = 0.
class MasterEqProblem {
 public:
  MasterEqProblem(HermitianOperator hs, DisorderEnsemble ensemble, GeneratorKind kind,
                  const Tolerances& tol = kDefaultTolerances);

  const HermitianOperator& hs() const { return hs_; }
  const DisorderEnsemble& ensemble() const { return ensemble_; }
  const EigenSystem& eig() const { return eig_; }
  const GeneratorKind& kind() const { return kind_; }
  const Tolerances& tolerances() const { return tol_; }

  /// H_k in the eigenbasis of hs.
  const ComplexMatrix& realization_in_eigenbasis(std::size_t k) const { return eigen_h_[k]; }
  bool realization_commutes(std::size_t k) const { return commuting_[k]; }
  /// Time-independent Htilde_k in the eigenbasis (GKSL problems only).
  const ComplexMatrix& markov_h_tilde_in_eigenbasis(std::size_t k) const { return markov_[k]; }

 private:
  HermitianOperator hs_;
  DisorderEnsemble ensemble_;
  EigenSystem eig_;
  GeneratorKind kind_;
  Tolerances tol_;
  std::vector<ComplexMatrix> eigen_h_;
  std::vector<bool> commuting_;
  std::vector<ComplexMatrix> markov_;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<DensityMatrix> states;

  /// Throws unless lengths match and times increase strictly.
  void validate() const;
  std::size_t size() const { return times.size(); }
};

/// phi(delta, t) = int_0^t ds e^{-i s delta}; t when |delta| <= threshold.
Complex gap_integral(double delta, double t, double threshold);

/// int_0^t ds e^{-isH_S} H e^{isH_S} in closed form. Returns t * H directly
/// when H commutes with the Hamiltonian `eig` diagonalizes.
ComplexMatrix h_tilde(const HermitianOperator& h_lambda, const EigenSystem& eig, double t,
                      const Tolerances& tol = kDefaultTolerances);

ComplexMatrix redfield_rhs(const MasterEqProblem& p, const DensityMatrix& rho, double t);
ComplexMatrix dephasing_rhs(const MasterEqProblem& p, const DensityMatrix& rho, double t);
ComplexMatrix gksl_rhs(const MasterEqProblem& p, const DensityMatrix& rho);

/// Dispatches on p.kind(); GKSL ignores t.
ComplexMatrix rhs(const MasterEqProblem& p, const ComplexMatrix& rho, double t);

/// Closed-form pure-dephasing solution
///   rho_nm(t) = rho_nm(0) e^{-it(E_n - E_m)} e^{-t^2 C_2(n,m) / 2}
/// in the shared eigenbasis. Requires spectral disorder (see c2).
DensityMatrix dephasing_analytic(const MasterEqProblem& p, const DensityMatrix& rho0, double t);

/// R_mn = i / (E_n - E_m + i epsilon) for m != n. The diagonal is 1/epsilon for
/// epsilon > 0 and 0 (dropped) for epsilon = 0, where the limit diverges.
/// epsilon = 0 with any degenerate pair of levels throws PreconditionError.
ComplexMatrix gksl_resolvent(const EigenSystem& eig, double epsilon,
                             const Tolerances& tol = kDefaultTolerances);

/// Fixed-step classical RK4 from 0 to t_final, re-Hermitizing after every
/// step. One sample per step; the last step is shortened to land on t_final.
/// Throws NumericalError with the step index on a non-finite state.
TimeSeries integrate(const MasterEqProblem& p, const DensityMatrix& rho0, double t_final,
                     double dt);

/// Uniform grid 0, dt, 2 dt, ..., t_final used by integrate.
std::vector<double> time_grid(double t_final, double dt);

/// Advisory message when dt * max|E_n| exceeds 0.05.
std::optional<std::string> step_size_warning(const MasterEqProblem& p, double dt);

}  // namespace rndunit
