#include "qwork/rapid_drive.hpp"

#include "qwork/deterministic.hpp"

#include <cmath>

#include <doctest.h>

using namespace qwork;

TEST_CASE("relative entropy basics") {
  const std::array<double, 2> p{0.3, 0.7};
  CHECK(relative_entropy(p, p) == 0.0);
  CHECK(relative_entropy_variance(p, p) == 0.0);

  // mixed state against the Gibbs populations of u = 1 at beta = 1
  const std::array<double, 2> mixed{0.5, 0.5};
  const double pg = 1.0 / (1.0 + std::exp(-2.0));
  const std::array<double, 2> gibbs{pg, 1.0 - pg};
  CHECK(relative_entropy(mixed, gibbs) ==
        doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-12));

  SplitMix64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const std::array<double, 2> a{rng.uniform(0.01, 0.99), 0.0};
    const std::array<double, 2> b{rng.uniform(0.01, 0.99), 0.0};
    const std::array<double, 2> pa{a[0], 1.0 - a[0]};
    const std::array<double, 2> qb{b[0], 1.0 - b[0]};
    CHECK(relative_entropy(pa, qb) >= 0.0);
    CHECK(relative_entropy_variance(pa, qb) >= -1e-15);
  }
}

TEST_CASE("relative entropy variance reduces to (beta u_T)^2 for the mixed state") {
  for (double ut : {0.5, 1.0, 2.0}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      const double pg = 1.0 / (1.0 + std::exp(-2.0 * beta * ut));
      const std::array<double, 2> mixed{0.5, 0.5};
      const std::array<double, 2> gibbs{pg, 1.0 - pg};
      CHECK(relative_entropy_variance(mixed, gibbs) ==
            doctest::Approx(beta * beta * ut * ut).epsilon(1e-9));
    }
  }
}

TEST_CASE("zero-probability handling") {
  const std::array<double, 2> p{1.0, 0.0};
  const std::array<double, 2> q{0.5, 0.5};
  CHECK(relative_entropy(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const std::array<double, 2> q0{1.0, 0.0};
  const std::array<double, 2> p_mixed{0.5, 0.5};
  CHECK_THROWS_AS(relative_entropy(p_mixed, q0), std::domain_error);
  CHECK_THROWS_AS(relative_entropy({0.6, 0.6}, q), std::invalid_argument);
}

TEST_CASE("rgb coefficients reduce to the incoherent closed forms") {
  const ModelSpec m = spin_boson(0.0, 1.0);
  const Vec4 pi0 = gibbs_vector(m, 0.0);
  for (int i = 0; i <= 38; ++i) {
    const double u = 0.1 + (2.0 - 0.1) * i / 38.0;
    const RgbCoefficients c = rgb_coefficients(m, u, pi0);
    CHECK(std::fabs(c.r - (-u * u * u)) < 1e-10);
    CHECK(std::fabs(c.g) < 1e-10);
    CHECK(std::fabs(c.b - (-2.0 * u * u * u / std::tanh(u))) < 1e-10);
  }
  const RgbCoefficients c1 = rgb_coefficients(m, 1.0, pi0);
  CHECK(c1.r == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(c1.b == doctest::Approx(-2.626).epsilon(1e-3));
}

TEST_CASE("rgb trace term vanishes for every model and control") {
  SplitMix64 rng(17);
  for (const ModelSpec& m : {spin_boson(0.0, 1.0), spin_boson(1.0, 2.0), quantum_dot(1.0, 1.5)}) {
    for (int i = 0; i < 12; ++i) {
      const double u0 = rng.uniform(-2.0, 2.0);
      const double u = rng.uniform(-3.0, 3.0);
      const RgbCoefficients c = rgb_coefficients(m, u, gibbs_vector(m, u0));
      CHECK(std::fabs(c.g) < 1e-13);
    }
  }
}

TEST_CASE("quantum-dot dissipation coefficient from the mixed state") {
  const ModelSpec m = quantum_dot(1.0, 1.0);
  const Vec4 pi0 = gibbs_vector(m, 0.0);
  for (double u : {-2.0, -0.5, 0.3, 1.0, 2.5}) {
    const RgbCoefficients c = rgb_coefficients(m, u, pi0);
    CHECK(c.r == doctest::Approx(-std::tanh(u)).epsilon(1e-12));
  }
}

TEST_CASE("rapid cost of trivial paths") {
  const ModelSpec m = spin_boson(0.0, 1.0);
  const TimeGrid grid{1.0, 100};
  SUBCASE("holding at the target leaves only the quench terms") {
    std::vector<double> u(101, 1.0);
    const auto [w, var] = rapid_cost(m, grid, u, 0.0, 1.0);
    CHECK(w == doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-12));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("interior plateau reduces both terms") {
    // constant path u = c: w_diss = log cosh(1) - (1 - c) c^3 T exactly
    const double c = 0.75;
    std::vector<double> u(101, c);
    const auto [w, var] = rapid_cost(m, grid, u, 0.0, 1.0);
    const double expected_w = std::log(std::cosh(1.0)) - (1.0 - c) * c * c * c;
    CHECK(w == doctest::Approx(expected_w).epsilon(1e-10));
    const double expected_var =
        1.0 - (1.0 - c) * 2.0 * c * c * c * c / std::tanh(c);
    CHECK(var == doctest::Approx(expected_var).epsilon(1e-9));
    CHECK(w < std::log(std::cosh(1.0)));
    CHECK(var < 1.0);
  }
  SUBCASE("coherent models are rejected for the entropy terms") {
    std::vector<double> u(101, 0.5);
    CHECK_THROWS_AS(rapid_cost(spin_boson(1.0, 1.0), grid, u, 0.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("optimal jump levels for the incoherent spin-boson protocol") {
  const ModelSpec m = spin_boson(0.0, 1.0);
  const RapidDriveSolution sol = optimal_jumps(m, 1.0, 1.0, 1.0);
  CHECK(sol.zeta == 0.75);  // 3/4 u_T exactly
  CHECK(sol.lambda_jump == doctest::Approx(0.7677946680601171).epsilon(1e-9));
  CHECK(std::fabs(sol.lambda_jump - 0.768) < 1e-3);

  // residual of the transcendental equation at the root
  const double lam = sol.lambda_jump;
  const double f = (5.0 * lam - 4.0) / std::tanh(lam) -
                   lam * (lam - 1.0) / (std::sinh(lam) * std::sinh(lam));
  CHECK(std::fabs(f) < 1e-12);

  // scaling in u_T
  const RapidDriveSolution sol2 = optimal_jumps(m, 2.0, 1.0, 1.0);
  CHECK(sol2.zeta == 1.5);

  // plateau costs match the closed forms used above
  CHECK(sol.w_diss_at ==
        doctest::Approx(std::log(std::cosh(1.0)) - 0.25 * 0.75 * 0.75 * 0.75).epsilon(1e-12));
}

TEST_CASE("stationarity residuals") {
  const ModelSpec m = spin_boson(0.0, 1.0);
  const RapidDriveSolution sol = optimal_jumps(m, 1.0, 1.0, 1.0);
  CHECK(std::fabs(dissipation_stationarity_residual(m, 1.0, 1.0, sol.zeta)) < 1e-8);
  CHECK(std::fabs(fluctuation_stationarity_residual(m, 1.0, 1.0, sol.lambda_jump)) < 1e-8);
  // the 0.6 u_T level is not stationary; keep it flagged, not matched
  CHECK(std::fabs(dissipation_stationarity_residual(m, 1.0, 1.0, 0.6)) > 0.1);
}

TEST_CASE("fluctuation jump level is continuous in beta") {
  const ModelSpec m = spin_boson(0.0, 1.0);
  double prev = -1.0;
  for (double beta = 0.1; beta <= 5.0 + 1e-9; beta += 0.1) {
    const RapidDriveSolution sol = optimal_jumps(m, 1.0, beta, 1.0);
    CHECK(sol.lambda_jump > 0.0);
    CHECK(sol.lambda_jump < 1.0);
    if (prev > 0.0) CHECK(std::fabs(sol.lambda_jump - prev) < 0.02);
    prev = sol.lambda_jump;
  }
  // the high-temperature limit collapses onto the dissipation jump
  const RapidDriveSolution hot = optimal_jumps(m, 1.0, 0.01, 1.0);
  CHECK(hot.lambda_jump == doctest::Approx(0.75).epsilon(1e-3));
}

TEST_CASE("quantum-dot jump levels come from the numeric stationarity path") {
  const ModelSpec m = quantum_dot(1.0, 1.0);
  const RapidDriveSolution sol = optimal_jumps(m, 1.0, 1.0, 1.0);
  CHECK(sol.zeta > 0.0);
  CHECK(sol.zeta < 1.0);
  CHECK(std::fabs(dissipation_stationarity_residual(m, 1.0, 1.0, sol.zeta)) < 1e-8);
  CHECK(std::fabs(fluctuation_stationarity_residual(m, 1.0, 1.0, sol.lambda_jump)) < 1e-8);
}

TEST_CASE("degenerate jump requests are rejected") {
  const ModelSpec m = spin_boson(0.0, 1.0);
  CHECK_THROWS_AS(optimal_jumps(m, 0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_jumps(m, -1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_jumps(m, 1.0, -2.0, 1.0), std::invalid_argument);
}
