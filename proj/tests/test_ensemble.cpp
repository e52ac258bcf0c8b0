#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rndunit/ensemble.hpp"
#include "rndunit/error.hpp"
#include "test_support.hpp"

using namespace rndunit;

namespace {

HermitianOperator sz() { return HermitianOperator(pauli::z()); }
HermitianOperator sx() { return HermitianOperator(pauli::x()); }

// Physicists' Hermite polynomial H_n and derivative by the three-term recurrence.
std::pair<double, double> hermite(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return {h1, 2.0 * n * h0};
}

// Brackets sign changes of H_n on a fine grid, then bisects; an oracle
// independent of the eigenvalue route. All roots lie in |x| < sqrt(2n + 1).
std::vector<double> hermite_roots_bisection(int n) {
  std::vector<double> roots;
  const double edge = std::sqrt(2.0 * n + 1.0);
  const int cells = 20000;
  double a = -edge;
  double fa = hermite(n, a).first;
  for (int i = 1; i <= cells; ++i) {
    double b = -edge + 2.0 * edge * i / cells;
    double fb = hermite(n, b).first;
    if ((fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      for (int iter = 0; iter < 200 && hi - lo > 1e-16; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = hermite(n, mid).first;
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace

TEST_CASE("DisorderEnsemble validation") {
  CHECK_NOTHROW(DisorderEnsemble({{sz(), 0.25}, {sx(), 0.75}}));
  CHECK_THROWS_WITH_AS(DisorderEnsemble({{sz(), 0.5}, {sx(), 0.4}}),
                       doctest::Contains("weights must sum to 1"), ValidationError);
  CHECK_THROWS_AS(DisorderEnsemble({{sz(), 1.5}, {sx(), -0.5}}), ValidationError);
  CHECK_THROWS_AS(DisorderEnsemble({{sz(), 0.5}, {HermitianOperator::zero(3), 0.5}}),
                  ValidationError);
  CHECK_THROWS_AS(DisorderEnsemble({}), ValidationError);
}

TEST_CASE("mean_hamiltonian") {
  const double g = 0.3;
  CHECK(max_abs(mean_hamiltonian(two_point_ensemble(sz(), g)).matrix()) == 0.0);
  CHECK(max_abs(mean_hamiltonian(DisorderEnsemble({{sx(), 1.0}})).matrix() - pauli::x()) == 0.0);
  const DisorderEnsemble three({{sx(), 0.25}, {sx(), 0.25}, {HermitianOperator::zero(2), 0.5}});
  CHECK(max_abs(mean_hamiltonian(three).matrix() - 0.5 * pauli::x()) < 1e-16);
}

TEST_CASE("center") {
  const double g = 0.7;
  SUBCASE("symmetric ensemble is unchanged") {
    const auto e = two_point_ensemble(sz(), g);
    const auto c = center(e);
    CHECK(max_abs(c.mean.matrix()) == 0.0);
    for (std::size_t k = 0; k < e.size(); ++k) {
      CHECK(c.ensemble[k].hamiltonian.matrix() == e[k].hamiltonian.matrix());
    }
  }
  SUBCASE("single realization") {
    const auto c = center(DisorderEnsemble({{sz(), 1.0}}));
    CHECK(max_abs(c.mean.matrix() - pauli::z()) == 0.0);
    CHECK(max_abs(c.ensemble[0].hamiltonian.matrix()) == 0.0);
  }
  SUBCASE("two-term weighted mean") {
    const auto c = center(DisorderEnsemble({{2.0 * g * sz(), 0.5}, {HermitianOperator::zero(2), 0.5}}));
    CHECK(max_abs(c.mean.matrix() - g * pauli::z()) < 1e-16);
    CHECK(max_abs(c.ensemble[0].hamiltonian.matrix() - g * pauli::z()) < 1e-16);
    CHECK(max_abs(c.ensemble[1].hamiltonian.matrix() + g * pauli::z()) < 1e-16);
  }
  SUBCASE("random ensembles: zero mean, reconstruction, idempotence") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
      const auto w = rndunit::testing::random_weights(rng, 5);
      std::vector<Realization> rs;
      for (double p : w) rs.push_back({rndunit::testing::random_hermitian(rng, 3), p});
      const DisorderEnsemble e(rs);
      const auto c = center(e);
      CHECK(has_zero_mean(c.ensemble, max_abs(c.mean.matrix())));
      for (std::size_t k = 0; k < e.size(); ++k) {
        CHECK(max_abs((c.mean + c.ensemble[k].hamiltonian).matrix() - e[k].hamiltonian.matrix()) <
              1e-15);
      }
      const auto again = center(c.ensemble);
      CHECK(max_abs(again.mean.matrix()) < 1e-15);
      for (std::size_t k = 0; k < e.size(); ++k) {
        CHECK(max_abs(again.ensemble[k].hamiltonian.matrix() - c.ensemble[k].hamiltonian.matrix()) <
              1e-15);
      }
    }
  }
}

TEST_CASE("gauss_hermite_rule") {
  SUBCASE("two nodes: x = +-1/sqrt(2), v = sqrt(pi)/2") {
    const auto rule = gauss_hermite_rule(2);
    CHECK(rule.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(rule.nodes[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(rule.weights[0] == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-14));
  }
  SUBCASE("three nodes: 0, +-sqrt(3/2), weights 2 sqrt(pi)/3 and sqrt(pi)/6") {
    const auto rule = gauss_hermite_rule(3);
    CHECK(rule.nodes[1] == 0.0);
    CHECK(rule.nodes[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
    CHECK(rule.weights[1] == doctest::Approx(2.0 * std::sqrt(std::numbers::pi) / 3).epsilon(1e-14));
    CHECK(rule.weights[0] == doctest::Approx(std::sqrt(std::numbers::pi) / 6).epsilon(1e-14));
  }
  SUBCASE("nodes agree with bisected roots of H_n") {
    for (int n : {5, 12, 20}) {
      const auto rule = gauss_hermite_rule(static_cast<std::size_t>(n));
      const auto roots = hermite_roots_bisection(n);
      REQUIRE(roots.size() == static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) CHECK(std::abs(rule.nodes[k] - roots[k]) < 1e-12);
    }
  }
}

TEST_CASE("gauss_hermite_ensemble") {
  const double sigma = 0.3;
  SUBCASE("two nodes map to +-sigma with weights 1/2") {
    const auto e = gauss_hermite_ensemble(sz(), sigma, 2);
    CHECK(e[0].hamiltonian.matrix()(0, 0).real() == doctest::Approx(-sigma).epsilon(1e-15));
    CHECK(e[1].hamiltonian.matrix()(0, 0).real() == doctest::Approx(sigma).epsilon(1e-15));
    CHECK(e[0].weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e[1].weight == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("moments") {
    for (std::size_t n : {1, 2, 3, 4, 8, 33}) {
      const auto e = gauss_hermite_ensemble(sz(), sigma, n);
      double m0 = 0, m1 = 0, m2 = 0;
      for (const auto& r : e.realizations()) {
        const double lambda = r.hamiltonian.matrix()(0, 0).real();
        m0 += r.weight;
        m1 += r.weight * lambda;
        m2 += r.weight * lambda * lambda;
      }
      CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(m1) < 1e-16);
      if (n >= 2) CHECK(m2 == doctest::Approx(sigma * sigma).epsilon(1e-13));
    }
    // Exact through degree 2n - 1 = 5 at three nodes: 1, 0, s^2, 0, 3 s^4, 0.
    const auto e = gauss_hermite_ensemble(sz(), sigma, 3);
    const double expected[] = {1.0, 0.0, sigma * sigma, 0.0, 3 * std::pow(sigma, 4), 0.0};
    for (int k = 0; k <= 5; ++k) {
      double mk = 0.0;
      for (const auto& r : e.realizations()) {
        CHECK(r.weight > 0.0);
        mk += r.weight * std::pow(r.hamiltonian.matrix()(0, 0).real(), k);
      }
      CHECK(std::abs(mk - expected[k]) < 1e-15);
    }
  }
  CHECK_THROWS_AS(gauss_hermite_ensemble(sz(), 0.0, 4), ValidationError);
  CHECK_THROWS_AS(gauss_hermite_ensemble(sz(), -1.0, 4), ValidationError);
}

TEST_CASE("monte_carlo_gaussian_ensemble is seeded") {
  const auto a = monte_carlo_gaussian_ensemble(sz(), 0.5, 4000, 42);
  const auto b = monte_carlo_gaussian_ensemble(sz(), 0.5, 4000, 42);
  const auto c = monte_carlo_gaussian_ensemble(sz(), 0.5, 4000, 43);
  double var = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].hamiltonian.matrix() == b[k].hamiltonian.matrix());
    const double lambda = a[k].hamiltonian.matrix()(0, 0).real();
    var += a[k].weight * lambda * lambda;
  }
  CHECK(a[0].hamiltonian.matrix() != c[0].hamiltonian.matrix());
  CHECK(var == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("c2") {
  const HermitianOperator hs(0.5 * pauli::z());
  const auto eig = herm_eig(hs);
  SUBCASE("two-point ensemble, brute force over the realizations") {
    const double g = 0.4;
    const auto e = two_point_ensemble(sz(), g);
    // Each realization shifts the gap by 2 lambda; (2g)^2 for both signs.
    CHECK(c2(e, eig, 0, 1) == doctest::Approx(4 * g * g).epsilon(1e-14));
    CHECK(c2(e, eig, 1, 0) == doctest::Approx(4 * g * g).epsilon(1e-14));
    CHECK(c2(e, eig, 1, 1) == 0.0);
  }
  SUBCASE("Gaussian ensemble matches the second moment") {
    const double sigma = 0.2;
    const auto e = gauss_hermite_ensemble(sz(), sigma, 8);
    CHECK(c2(e, eig, 0, 1) == doctest::Approx(4 * sigma * sigma).epsilon(1e-13));
  }
  SUBCASE("non-commuting realization is rejected with its index") {
    const DisorderEnsemble e({{sz(), 0.5}, {sx(), 0.5}});
    CHECK_THROWS_WITH_AS(c2(e, eig, 0, 1), doctest::Contains("realization 1"), PreconditionError);
  }
  SUBCASE("non-diagonal inside a degenerate subspace is rejected") {
    const auto degenerate = herm_eig(HermitianOperator::zero(2));
    const DisorderEnsemble e({{sx(), 0.5}, {-1.0 * sx(), 0.5}});
    CHECK_THROWS_AS(c2(e, degenerate, 0, 1), PreconditionError);
  }
  CHECK_THROWS_AS(c2(two_point_ensemble(sz(), 1.0), eig, 0, 2), ValidationError);
}
