#include <doctest.h>

#include <cmath>
#include <random>

#include "rndunit/channel.hpp"
#include "rndunit/error.hpp"
#include "rndunit/mastereq.hpp"
#include "test_support.hpp"

using namespace rndunit;
namespace rt = rndunit::testing;

namespace {

HermitianOperator half_sz() { return HermitianOperator(0.5 * pauli::z()); }

DensityMatrix plus_state(Eigen::Index d = 2) {
  return DensityMatrix::pure(Eigen::VectorXcd::Ones(d) / std::sqrt(static_cast<double>(d)));
}

DisorderEnsemble centered_random(std::mt19937_64& rng, Eigen::Index d, std::size_t n,
                                 double scale) {
  const auto w = rt::random_weights(rng, n);
  std::vector<Realization> rs;
  for (double p : w) rs.push_back({rt::random_hermitian(rng, d, scale), p});
  return center(DisorderEnsemble(rs)).ensemble;
}

// (epsilon + i ad_H)^{-1} A, i.e. int_0^inf ds e^{-eps s} e^{-isH} A e^{isH}, by a
// dense Kronecker solve in the original basis.
ComplexMatrix sylvester_h_tilde(const ComplexMatrix& h, const ComplexMatrix& a, double eps) {
  const auto d = h.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix op = eps * ComplexMatrix::Identity(d * d, d * d) +
                           kI * (kron(id, h) - kron(h.transpose(), id));
  const Eigen::VectorXcd x = op.fullPivLu().solve(a.reshaped());
  return x.reshaped(d, d);
}

}  // namespace

TEST_CASE("gap_integral") {
  CHECK(gap_integral(0.0, 2.5, 1e-12) == Complex(2.5, 0.0));
  for (double delta : {1e-3, 0.7, -2.0, 40.0}) {
    for (double t : {0.1, 1.0, 9.0}) {
      const Complex naive = (1.0 - std::exp(Complex(0.0, -t * delta))) / Complex(0.0, delta);
      CHECK(std::abs(gap_integral(delta, t, 1e-12) - naive) < 1e-12);
    }
  }
  // Small gaps stay accurate where the naive form cancels.
  CHECK(std::abs(gap_integral(1e-10, 1.0, 1e-14) - Complex(1.0, -0.5e-10)) < 1e-18);
}

TEST_CASE("h_tilde") {
  SUBCASE("matches trapezoid quadrature") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ut(0.2, 1.5);
    for (int trial = 0; trial < 5; ++trial) {
      const auto hs = rt::random_hermitian(rng, 3, 0.5);
      const auto h = rt::random_hermitian(rng, 3, 0.5);
      const double t = ut(rng);
      const ComplexMatrix closed = h_tilde(h, herm_eig(hs), t);
      CHECK(max_abs(closed - rt::trapezoid_h_tilde(hs.matrix(), h.matrix(), t, 10000)) <= 1e-8);
    }
  }
  SUBCASE("commuting input returns t H") {
    const HermitianOperator h(0.3 * pauli::z());
    CHECK(max_abs(h_tilde(h, herm_eig(half_sz()), 2.2) - 2.2 * h.matrix()) <= 1e-14);
  }
  SUBCASE("t = 0 gives zero") {
    CHECK(max_abs(h_tilde(HermitianOperator(pauli::x()), herm_eig(half_sz()), 0.0)) == 0.0);
  }
  CHECK_THROWS_AS(h_tilde(HermitianOperator(pauli::x()), herm_eig(half_sz()), -1.0),
                  ValidationError);
}

TEST_CASE("MasterEqProblem validation") {
  CHECK_THROWS_AS(MasterEqProblem(half_sz(), DisorderEnsemble({{HermitianOperator(pauli::x()), 1.0}}),
                                  Redfield{}),
                  ValidationError);
  CHECK_THROWS_AS(MasterEqProblem(half_sz(), two_point_ensemble(HermitianOperator(pauli::x()), 0.1),
                                  Dephasing{}),
                  PreconditionError);
  CHECK_THROWS_AS(MasterEqProblem(HermitianOperator::zero(2),
                                  two_point_ensemble(HermitianOperator(pauli::x()), 0.1), Gksl{}),
                  PreconditionError);
  CHECK_NOTHROW(MasterEqProblem(HermitianOperator::zero(2),
                                two_point_ensemble(HermitianOperator(pauli::x()), 0.1), Gksl{0.1}));
  const MasterEqProblem p(half_sz(), two_point_ensemble(HermitianOperator(pauli::z()), 0.1),
                          Redfield{});
  CHECK_THROWS_AS(dephasing_rhs(p, plus_state(), 0.0), ValidationError);
  CHECK_THROWS_AS(rhs(p, ComplexMatrix::Identity(3, 3), 0.0), ValidationError);
}

TEST_CASE("dephasing generator on a qubit") {
  const double g = 0.3;
  const MasterEqProblem p(half_sz(), two_point_ensemble(HermitianOperator(pauli::z()), g),
                          Dephasing{});
  const auto rho = plus_state();
  for (double t : {0.0, 0.5, 2.0}) {
    const ComplexMatrix d = dephasing_rhs(p, rho, t);
    CHECK(std::abs(d(0, 1) - Complex(-4 * g * g * t, -1.0) * rho(0, 1)) < 1e-15);
    CHECK(std::abs(d(0, 0)) < 1e-16);
    CHECK(std::abs(d.trace()) < 1e-16);
  }
}

TEST_CASE("Redfield equals dephasing when everything commutes") {
  const auto e = gauss_hermite_ensemble(HermitianOperator(pauli::z()), 0.2, 8);
  const MasterEqProblem red(half_sz(), e, Redfield{});
  const MasterEqProblem dep(half_sz(), e, Dephasing{});
  std::mt19937_64 rng(42);
  const auto rho = rt::random_state(rng, 2);
  CHECK(max_abs(redfield_rhs(red, rho, 1.3) - dephasing_rhs(dep, rho, 1.3)) < 1e-15);
}

TEST_CASE("Redfield generator against a direct evaluation") {
  std::mt19937_64 rng(43);
  const auto hs = rt::random_hermitian(rng, 3);
  const auto e = centered_random(rng, 3, 4, 0.3);
  const MasterEqProblem p(hs, e, Redfield{});
  const auto rho = rt::random_state(rng, 3);
  const double t = 0.8;
  ComplexMatrix expected = -kI * commutator(hs.matrix(), rho.matrix());
  for (const auto& r : e.realizations()) {
    const ComplexMatrix ht = rt::trapezoid_h_tilde(hs.matrix(), r.hamiltonian.matrix(), t, 20000);
    expected -= r.weight * commutator(r.hamiltonian.matrix(), commutator(ht, rho.matrix()));
  }
  CHECK(max_abs(redfield_rhs(p, rho, t) - expected) < 1e-8);
}

TEST_CASE("GKSL resolvent and generator") {
  SUBCASE("nondegenerate qubit at epsilon = 0") {
    const ComplexMatrix r = gksl_resolvent(herm_eig(half_sz()), 0.0);
    CHECK(std::abs(r(0, 1) - kI) < 1e-15);
    CHECK(std::abs(r(1, 0) + kI) < 1e-15);
    CHECK(r(0, 0) == Complex(0.0));
  }
  SUBCASE("positive epsilon") {
    const ComplexMatrix r = gksl_resolvent(herm_eig(half_sz()), 0.5);
    CHECK(std::abs(r(0, 0) - 2.0) < 1e-15);
    CHECK(std::abs(r(0, 1) - kI / Complex(1.0, 0.5)) < 1e-15);
  }
  SUBCASE("degenerate spectrum") {
    CHECK_THROWS_WITH_AS(gksl_resolvent(herm_eig(HermitianOperator::zero(2)), 0.0),
                         doctest::Contains("degenerate"), PreconditionError);
    CHECK_NOTHROW(gksl_resolvent(herm_eig(HermitianOperator::zero(2)), 0.1));
    CHECK_THROWS_AS(gksl_resolvent(herm_eig(half_sz()), -0.1), ValidationError);
  }
  SUBCASE("generator against the resolvent-operator oracle") {
    std::mt19937_64 rng(44);
    const auto hs = rt::random_hermitian(rng, 3);
    const auto e = centered_random(rng, 3, 3, 0.2);
    const double eps = 0.1;
    const MasterEqProblem p(hs, e, Gksl{eps});
    const auto rho = rt::random_state(rng, 3);
    ComplexMatrix expected = -kI * commutator(hs.matrix(), rho.matrix());
    for (const auto& r : e.realizations()) {
      const ComplexMatrix ht = sylvester_h_tilde(hs.matrix(), r.hamiltonian.matrix(), eps);
      expected -= r.weight * commutator(r.hamiltonian.matrix(), commutator(ht, rho.matrix()));
    }
    CHECK(max_abs(gksl_rhs(p, rho) - expected) < 1e-12);
    // Time independent: identical bits at any t.
    CHECK(rhs(p, rho.matrix(), 0.0) == rhs(p, rho.matrix(), 17.0));
  }
}

TEST_CASE("dephasing_analytic") {
  const double sigma = 0.2;
  const auto e = gauss_hermite_ensemble(HermitianOperator(pauli::z()), sigma, 32);
  const MasterEqProblem p(half_sz(), e, Dephasing{});
  for (double t : {0.0, 1.0, 4.0, 10.0}) {
    const auto rho = dephasing_analytic(p, plus_state(), t);
    CHECK(std::abs(rho(0, 1)) ==
          doctest::Approx(0.5 * std::exp(-2 * sigma * sigma * t * t)).epsilon(1e-10));
    CHECK(std::abs(rho(0, 1) - evolve_average(half_sz(), e, plus_state(), t)(0, 1)) < 1e-12);
  }
}

TEST_CASE("time_grid") {
  const auto g = time_grid(1.0, 0.25);
  REQUIRE(g.size() == 5);
  CHECK(g[2] == 0.5);
  CHECK(g.back() == 1.0);
  const auto uneven = time_grid(1.0, 0.3);
  REQUIRE(uneven.size() == 5);
  CHECK(uneven[3] == doctest::Approx(0.9));
  CHECK(uneven.back() == 1.0);
  CHECK(time_grid(0.0, 0.1).size() == 1);
  CHECK(time_grid(10.0, 0.01).size() == 1001);
  CHECK_THROWS_AS(time_grid(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(time_grid(-1.0, 0.1), ValidationError);
}

TEST_CASE("integrate") {
  const double sigma = 0.3;
  const auto e = gauss_hermite_ensemble(HermitianOperator(pauli::z()), sigma, 16);
  const MasterEqProblem p(half_sz(), e, Dephasing{});
  const auto rho0 = plus_state();

  SUBCASE("fourth-order convergence") {
    const double t_final = 3.0;
    const ComplexMatrix exact = dephasing_analytic(p, rho0, t_final).matrix();
    const double coarse = max_abs(integrate(p, rho0, t_final, 0.2).states.back().matrix() - exact);
    const double fine = max_abs(integrate(p, rho0, t_final, 0.1).states.back().matrix() - exact);
    const double ratio = coarse / fine;
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
  SUBCASE("trace and Hermiticity are preserved") {
    const auto series = integrate(p, rho0, 5.0, 0.01);
    series.validate();
    for (const auto& rho : series.states) {
      CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-12);
      CHECK(max_abs(rho.matrix() - rho.matrix().adjoint()) == 0.0);
    }
  }
  SUBCASE("divergence is reported with the step") {
    const MasterEqProblem stiff(HermitianOperator(1e3 * pauli::z()),
                                two_point_ensemble(HermitianOperator(pauli::z()), 0.1), Redfield{});
    CHECK_THROWS_WITH_AS(integrate(stiff, rho0, 500.0, 1.0), doctest::Contains("step"),
                         NumericalError);
  }
}

TEST_CASE("short-time expansion matches the exact channel to second order") {
  std::mt19937_64 rng(45);
  const auto hs = rt::random_hermitian(rng, 3);
  const auto e = centered_random(rng, 3, 4, 0.5);
  const MasterEqProblem p(hs, e, Redfield{});
  const auto rho0 = rt::random_pure_state(rng, 3);
  const auto err = [&](double t) {
    const auto series = integrate(p, rho0, t, t / 200);
    return max_abs(series.states.back().matrix() - evolve_average(hs, e, rho0, t).matrix());
  };
  // Agreement of the t and t^2 coefficients leaves an O(t^3) remainder.
  CHECK(err(0.04) / err(0.02) > 7.0);
}

TEST_CASE("step_size_warning") {
  const MasterEqProblem p(half_sz(), two_point_ensemble(HermitianOperator(pauli::z()), 0.1),
                          Redfield{});
  CHECK_FALSE(step_size_warning(p, 0.01).has_value());
  CHECK(step_size_warning(p, 0.2).has_value());
}
