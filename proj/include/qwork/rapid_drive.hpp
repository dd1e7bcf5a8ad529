#pragma once

#include "qwork/propagation.hpp"

#include <array>
#include <span>
#include <utility>

namespace qwork {

// Analytic short-horizon limit: the state stays near the initial Gibbs state
// and the optimal protocol is two jumps bracketing a plateau.

struct RgbCoefficients {
  double r = 0.0;  // Tr[sigma_z L_u(pi0)]
  double g = 0.0;  // (1/2) Tr[{sigma_z, sigma_z} L_u(pi0)]; zero by trace annihilation
  double b = 0.0;  // Tr[sigma_z L_u({sigma_z, pi0})]
};

struct RapidDriveSolution {
  double zeta = 0.0;         // dissipation-minimizing plateau
  double lambda_jump = 0.0;  // fluctuation-minimizing plateau
  double w_diss_at = 0.0;    // dissipated work of the plateau-at-zeta protocol
  double variance_at = 0.0;  // work variance of the plateau-at-lambda protocol
};

// Classical relative entropy sum_i p_i log(p_i/q_i) for two-outcome
// distributions, with 0 log 0 = 0. Throws on q_i = 0 with p_i > 0.
double relative_entropy(const std::array<double, 2>& p, const std::array<double, 2>& q);

// sum_i p_i (log p_i - log q_i)^2 - S(p||q)^2
double relative_entropy_variance(const std::array<double, 2>& p, const std::array<double, 2>& q);

// Numeric evaluation through the vectorized generator acting on pi0 and on
// {sigma_z, pi0}. For the incoherent spin-boson case with pi0 = I/2 these
// reduce to R(u) = -k u^3, G = 0, B(u) = -2 k u^3 coth(beta u).
RgbCoefficients rgb_coefficients(const ModelSpec& model, double u, const Vec4& pi0);

// Short-horizon cost of a control path sampled on the grid (trapezoid rule):
//   w_diss   = S(pi(u0)||pi(uT))/beta       + int (uT - u) R(u) dt
//   variance = V(pi(u0)||pi(uT))/beta^2     + int [(uT-u)^2 G(u) + (uT-u) B(u) u] dt
// Requires commuting endpoint Gibbs states (delta = 0).
std::pair<double, double> rapid_cost(const ModelSpec& model, const TimeGrid& grid,
                                     std::span<const double> u, double u0, double u_target);

// Optimal plateau levels for a protocol from u = 0 to u_T. The spin-boson
// incoherent case uses the closed forms: zeta = (3/4) u_T and lambda solving
//   (5 L - 4 uT) coth(beta L) = beta L (L - uT) csch^2(beta L)
// by bisection; other models locate the stationary points of the two
// integrands numerically.
RapidDriveSolution optimal_jumps(const ModelSpec& model, double u_target, double beta,
                                 double horizon);

// Stationarity residuals of the two jump conditions at a candidate plateau,
// computed by central differences of the integrands.
double dissipation_stationarity_residual(const ModelSpec& model, double u_target, double beta,
                                         double plateau);
double fluctuation_stationarity_residual(const ModelSpec& model, double u_target, double beta,
                                         double plateau);

}  // namespace qwork
