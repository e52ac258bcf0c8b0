#include "rndunit/mastereq.hpp"

#include <cmath>
#include <sstream>

#include "rndunit/error.hpp"

namespace rndunit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double max_realization_norm(const DisorderEnsemble& e) {
  double m = 0.0;
  for (const auto& r : e.realizations()) m = std::max(m, max_abs(r.hamiltonian.matrix()));
  return m;
}

void require_kind(const MasterEqProblem& p, bool ok, const char* what) {
  if (!ok) {
    throw ValidationError(std::string(what) + ": problem was built for the " +
                          generator_name(p.kind()) + " generator");
  }
}

void require_dim(const MasterEqProblem& p, const ComplexMatrix& rho, const char* what) {
  const auto d = static_cast<Eigen::Index>(p.hs().dim());
  if (rho.rows() != d || rho.cols() != d) {
    throw ValidationError(std::string(what) + ": state dimension does not match the problem");
  }
}

ComplexMatrix von_neumann(const MasterEqProblem& p, const ComplexMatrix& rho) {
  return -kI * commutator(p.hs().matrix(), rho);
}

// -V (sum_k p_k [H_k, [Htilde_k, rho]]) V^dag with everything in the eigenbasis.
template <class HTilde>
ComplexMatrix eigenbasis_dissipator(const MasterEqProblem& p, const ComplexMatrix& rho,
                                    HTilde&& h_tilde_eb) {
  const ComplexMatrix rho_eb = p.eig().to_eigenbasis(rho);
  ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
  const auto& e = p.ensemble();
  for (std::size_t k = 0; k < e.size(); ++k) {
    const ComplexMatrix& h = p.realization_in_eigenbasis(k);
    const ComplexMatrix ht = h_tilde_eb(k);
    acc += e[k].weight * commutator(h, commutator(ht, rho_eb));
  }
  return -p.eig().from_eigenbasis(acc);
}

ComplexMatrix h_tilde_eigenbasis(const ComplexMatrix& h_eb, const EigenSystem& eig, double t,
                                 double threshold) {
  const auto d = h_eb.rows();
  ComplexMatrix out(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      out(m, n) = h_eb(m, n) * gap_integral(eig.energies(m) - eig.energies(n), t, threshold);
    }
  }
  return out;
}

}  // namespace

std::string generator_name(const GeneratorKind& kind) {
  return std::visit(overloaded{[](const Redfield&) { return std::string("redfield"); },
                               [](const Dephasing&) { return std::string("dephasing"); },
                               [](const Gksl&) { return std::string("gksl"); }},
                    kind);
}

MasterEqProblem::MasterEqProblem(HermitianOperator hs, DisorderEnsemble ensemble,
                                 GeneratorKind kind, const Tolerances& tol)
    : hs_(std::move(hs)),
      ensemble_(std::move(ensemble)),
      eig_(herm_eig(hs_)),
      kind_(kind),
      tol_(tol) {
  if (ensemble_.dim() != hs_.dim()) {
    throw ValidationError("MasterEqProblem: ensemble dimension " +
                          std::to_string(ensemble_.dim()) +
                          " does not match system dimension " + std::to_string(hs_.dim()));
  }
  if (!has_zero_mean(ensemble_, max_realization_norm(ensemble_), tol_)) {
    throw ValidationError(
        "MasterEqProblem: ensemble must have zero weighted mean; center it and fold the mean "
        "into the system Hamiltonian first");
  }
  eigen_h_.reserve(ensemble_.size());
  commuting_.reserve(ensemble_.size());
  for (const auto& r : ensemble_.realizations()) {
    eigen_h_.push_back(eig_.to_eigenbasis(r.hamiltonian.matrix()));
    commuting_.push_back(commutes(r.hamiltonian.matrix(), hs_.matrix(), tol_));
  }

  if (std::holds_alternative<Dephasing>(kind_)) {
    for (std::size_t k = 0; k < commuting_.size(); ++k) {
      if (!commuting_[k]) {
        throw PreconditionError("dephasing generator: realization " + std::to_string(k) +
                                " does not commute with the system Hamiltonian");
      }
    }
  }
  if (const auto* g = std::get_if<Gksl>(&kind_)) {
    const ComplexMatrix r = gksl_resolvent(eig_, g->epsilon, tol_);
    markov_.reserve(ensemble_.size());
    for (const auto& h : eigen_h_) markov_.push_back(r.cwiseProduct(h));
  }
}

void TimeSeries::validate() const {
  if (times.size() != states.size()) {
    throw ValidationError("TimeSeries: times and states differ in length");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw ValidationError("TimeSeries: times must be strictly increasing");
    }
  }
}

Complex gap_integral(double delta, double t, double threshold) {
  if (std::abs(delta) <= threshold) return {t, 0.0};
  // (1 - e^{-ix}) / (i delta) with x = t delta, written to avoid cancellation.
  const double x = t * delta;
  const double half = std::sin(0.5 * x);
  return {std::sin(x) / delta, -2.0 * half * half / delta};
}

ComplexMatrix h_tilde(const HermitianOperator& h_lambda, const EigenSystem& eig, double t,
                      const Tolerances& tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ValidationError("h_tilde: t must be finite and nonnegative");
  }
  if (h_lambda.dim() != eig.dim()) throw ValidationError("h_tilde: dimension mismatch");
  const HermitianOperator hs = reconstruct(eig);
  if (commutes(h_lambda.matrix(), hs.matrix(), tol)) return t * h_lambda.matrix();
  const ComplexMatrix h_eb = eig.to_eigenbasis(h_lambda.matrix());
  return eig.from_eigenbasis(h_tilde_eigenbasis(h_eb, eig, t, eig.degeneracy_threshold(tol)));
}

ComplexMatrix redfield_rhs(const MasterEqProblem& p, const DensityMatrix& rho, double t) {
  require_kind(p, std::holds_alternative<Redfield>(p.kind()), "redfield_rhs");
  return rhs(p, rho.matrix(), t);
}

ComplexMatrix dephasing_rhs(const MasterEqProblem& p, const DensityMatrix& rho, double t) {
  require_kind(p, std::holds_alternative<Dephasing>(p.kind()), "dephasing_rhs");
  return rhs(p, rho.matrix(), t);
}

ComplexMatrix gksl_rhs(const MasterEqProblem& p, const DensityMatrix& rho) {
  require_kind(p, std::holds_alternative<Gksl>(p.kind()), "gksl_rhs");
  return rhs(p, rho.matrix(), 0.0);
}

ComplexMatrix rhs(const MasterEqProblem& p, const ComplexMatrix& rho, double t) {
  require_dim(p, rho, "rhs");
  const double threshold = p.eig().degeneracy_threshold(p.tolerances());
  return std::visit(
      overloaded{
          [&](const Redfield&) -> ComplexMatrix {
            return von_neumann(p, rho) + eigenbasis_dissipator(p, rho, [&](std::size_t k) {
                     const ComplexMatrix& h = p.realization_in_eigenbasis(k);
                     if (p.realization_commutes(k)) return ComplexMatrix(t * h);
                     return h_tilde_eigenbasis(h, p.eig(), t, threshold);
                   });
          },
          [&](const Dephasing&) -> ComplexMatrix {
            ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
            for (const auto& r : p.ensemble().realizations()) {
              const ComplexMatrix& h = r.hamiltonian.matrix();
              acc += r.weight * commutator(h, commutator(h, rho));
            }
            return von_neumann(p, rho) - t * acc;
          },
          [&](const Gksl&) -> ComplexMatrix {
            return von_neumann(p, rho) + eigenbasis_dissipator(p, rho, [&](std::size_t k) {
                     return p.markov_h_tilde_in_eigenbasis(k);
                   });
          }},
      p.kind());
}

DensityMatrix dephasing_analytic(const MasterEqProblem& p, const DensityMatrix& rho0, double t) {
  require_dim(p, rho0.matrix(), "dephasing_analytic");
  require_spectral_disorder(p.ensemble(), p.eig(), p.tolerances());
  const auto& eig = p.eig();
  const auto d = static_cast<Eigen::Index>(eig.dim());

  // Level energies of every realization in the shared basis.
  const auto& e = p.ensemble();
  std::vector<Eigen::VectorXd> levels;
  levels.reserve(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    levels.push_back(p.realization_in_eigenbasis(k).diagonal().real());
  }

  ComplexMatrix rho = eig.to_eigenbasis(rho0.matrix());
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      if (n == m) continue;
      double corr = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) {
        const double gap = levels[k](n) - levels[k](m);
        corr += e[k].weight * gap * gap;
      }
      const double phase = -t * (eig.energies(n) - eig.energies(m));
      rho(n, m) *= std::polar(std::exp(-0.5 * t * t * corr), phase);
    }
  }
  return DensityMatrix(eig.from_eigenbasis(rho));
}

ComplexMatrix gksl_resolvent(const EigenSystem& eig, double epsilon, const Tolerances& tol) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("gksl_resolvent: epsilon must be finite and nonnegative");
  }
  const auto d = static_cast<Eigen::Index>(eig.dim());
  const double threshold = eig.degeneracy_threshold(tol);
  ComplexMatrix r(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      const double gap = eig.energies(n) - eig.energies(m);
      if (m == n) {
        r(m, n) = epsilon > 0.0 ? Complex(1.0 / epsilon, 0.0) : Complex(0.0, 0.0);
        continue;
      }
      if (epsilon == 0.0 && std::abs(gap) <= threshold) {
        std::ostringstream msg;
        msg << "gksl_resolvent: levels " << m << " and " << n
            << " are degenerate; i/(E_n - E_m + i*epsilon) diverges at epsilon = 0 "
               "(use epsilon > 0)";
        throw PreconditionError(msg.str());
      }
      r(m, n) = kI / Complex(gap, epsilon);
    }
  }
  return r;
}

std::vector<double> time_grid(double t_final, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time grid: dt must be > 0");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw ValidationError("time grid: t_final must be >= 0");
  }
  const double ratio = t_final / dt;
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(static_cast<double>(steps) - ratio) > 1e-9 * std::max(1.0, ratio)) {
    steps = static_cast<std::size_t>(std::ceil(ratio));
  }
  std::vector<double> times(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) times[k] = static_cast<double>(k) * dt;
  times[steps] = t_final;
  return times;
}

TimeSeries integrate(const MasterEqProblem& p, const DensityMatrix& rho0, double t_final,
                     double dt) {
  require_dim(p, rho0.matrix(), "integrate");
  TimeSeries series;
  series.times = time_grid(t_final, dt);
  series.states.reserve(series.times.size());
  series.states.push_back(rho0);

  ComplexMatrix rho = rho0.matrix();
  for (std::size_t k = 1; k < series.times.size(); ++k) {
    const double t = series.times[k - 1];
    const double h = series.times[k] - t;
    const ComplexMatrix k1 = rhs(p, rho, t);
    const ComplexMatrix k2 = rhs(p, rho + (0.5 * h) * k1, t + 0.5 * h);
    const ComplexMatrix k3 = rhs(p, rho + (0.5 * h) * k2, t + 0.5 * h);
    const ComplexMatrix k4 = rhs(p, rho + h * k3, t + h);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    if (!all_finite(rho)) {
      throw NumericalError("integrate: non-finite state at step " + std::to_string(k) +
                           " (t = " + std::to_string(series.times[k]) + ")");
    }
    series.states.push_back(DensityMatrix::unchecked(rho));
  }
  return series;
}

std::optional<std::string> step_size_warning(const MasterEqProblem& p, double dt) {
  const double scale = p.eig().energies.cwiseAbs().maxCoeff();
  if (dt * scale <= 0.05) return std::nullopt;
  std::ostringstream msg;
  msg << "dt * max|E_n| = " << dt * scale << " exceeds 0.05; RK4 accuracy may suffer";
  return msg.str();
}

}  // namespace rndunit
