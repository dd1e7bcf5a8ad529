#include "qwork/rapid_drive.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace qwork {

namespace {

constexpr Vec4 kG{{-1.0, 1.0, 0.0, 0.0}};

void check_probabilities(const std::array<double, 2>& p, const char* name) {
  if (p[0] < 0.0 || p[1] < 0.0 || !std::isfinite(p[0]) || !std::isfinite(p[1])) {
    throw std::invalid_argument(std::string(name) + " is not a probability pair");
  }
  if (std::fabs(p[0] + p[1] - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(name) + " does not sum to one");
  }
}

// log(p/q) with the conventions needed by S and V
double log_ratio(double p, double q) {
  if (p == 0.0) return 0.0;  // weighted by p = 0 downstream
  if (q <= 0.0) {
    throw std::domain_error("relative entropy diverges: support mismatch");
  }
  return std::log(p / q);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo,
              double target_abs) {
  double a = lo, b = hi, fa = f_lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (std::fabs(fm) < target_abs || 0.5 * (b - a) < 1e-15) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// stationary point of fn on (lo, hi): sign scan of the central-difference
// derivative, then bisection; picks the root closest to prefer.
double stationary_point(const std::function<double(double)>& fn, double lo, double hi,
                        double prefer) {
  const int scan = 1000;
  const double h = 1e-6 * (hi - lo);
  auto deriv = [&](double u) { return (fn(u + h) - fn(u - h)) / (2.0 * h); };
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_dist = std::numeric_limits<double>::infinity();
  double prev_u = lo + (hi - lo) * 1e-6;
  double prev_d = deriv(prev_u);
  for (int i = 1; i <= scan; ++i) {
    const double u = lo + (hi - lo) * (1e-6 + (1.0 - 2e-6) * i / scan);
    const double d = deriv(u);
    if ((prev_d < 0.0) != (d < 0.0)) {
      const double root = bisect(deriv, prev_u, u, prev_d, 1e-12);
      const double dist = std::fabs(root - prefer);
      if (dist < best_dist) {
        best_dist = dist;
        best = root;
      }
    }
    prev_u = u;
    prev_d = d;
  }
  if (!std::isfinite(best)) {
    throw std::runtime_error("no stationary point found in the jump-level bracket");
  }
  return best;
}

std::array<double, 2> gibbs_populations(const ModelSpec& model, double u) {
  if (model.kind == ModelKind::SpinBoson && model.delta != 0.0) {
    throw std::invalid_argument(
        "rapid-drive relative entropies need commuting Gibbs states (delta = 0)");
  }
  const Vec4 x = gibbs_vector(model, u);
  return {x[0], x[1]};
}

}  // namespace

double relative_entropy(const std::array<double, 2>& p, const std::array<double, 2>& q) {
  check_probabilities(p, "p");
  check_probabilities(q, "q");
  double s = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    if (p[i] > 0.0) s += p[i] * log_ratio(p[i], q[i]);
  }
  return s;
}

double relative_entropy_variance(const std::array<double, 2>& p, const std::array<double, 2>& q) {
  check_probabilities(p, "p");
  check_probabilities(q, "q");
  const double s = relative_entropy(p, q);
  double m2 = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    if (p[i] > 0.0) {
      const double lr = log_ratio(p[i], q[i]);
      m2 += p[i] * lr * lr;
    }
  }
  return m2 - s * s;
}

RgbCoefficients rgb_coefficients(const ModelSpec& model, double u, const Vec4& pi0) {
  const Mat4 a = generator(model, u);
  const Vec4 api = a * pi0;
  RgbCoefficients out;
  out.r = dot(kG, api);
  out.g = api[0] + api[1];  // trace of the generator image
  const Vec4 anti{{-2.0 * pi0[0], 2.0 * pi0[1], 0.0, 0.0}};  // vec({sigma_z, pi0})
  out.b = dot(kG, a * anti);
  return out;
}

std::pair<double, double> rapid_cost(const ModelSpec& model, const TimeGrid& grid,
                                     std::span<const double> u, double u0, double u_target) {
  model.validate();
  grid.validate();
  if (u.size() != static_cast<std::size_t>(grid.steps) + 1) {
    throw std::invalid_argument("control path must have one sample per grid point");
  }
  const auto p = gibbs_populations(model, u0);
  const auto q = gibbs_populations(model, u_target);
  const double s = relative_entropy(p, q);
  const double vrel = relative_entropy_variance(p, q);
  const Vec4 pi0 = gibbs_vector(model, u0);
  const double dt = grid.dt();
  double int_w = 0.0, int_v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const RgbCoefficients c = rgb_coefficients(model, u[i], pi0);
    const double gap = u_target - u[i];
    const double f_w = gap * c.r;
    const double f_v = gap * gap * c.g + gap * c.b * u[i];
    const double w = (i == 0 || i + 1 == u.size()) ? 0.5 : 1.0;
    int_w += w * dt * f_w;
    int_v += w * dt * f_v;
  }
  const double beta = model.beta;
  return {s / beta + int_w, vrel / (beta * beta) + int_v};
}

double dissipation_stationarity_residual(const ModelSpec& model, double u_target, double beta,
                                         double plateau) {
  ModelSpec m = model;
  m.beta = beta;
  const Vec4 pi0 = gibbs_vector(m, 0.0);
  auto fn = [&](double u) { return (u_target - u) * rgb_coefficients(m, u, pi0).r; };
  const double h = 1e-5;
  return (fn(plateau + h) - fn(plateau - h)) / (2.0 * h);
}

double fluctuation_stationarity_residual(const ModelSpec& model, double u_target, double beta,
                                         double plateau) {
  ModelSpec m = model;
  m.beta = beta;
  const Vec4 pi0 = gibbs_vector(m, 0.0);
  auto fn = [&](double u) {
    const RgbCoefficients c = rgb_coefficients(m, u, pi0);
    const double gap = u_target - u;
    return gap * gap * c.g + gap * c.b * u;
  };
  const double h = 1e-5;
  return (fn(plateau + h) - fn(plateau - h)) / (2.0 * h);
}

RapidDriveSolution optimal_jumps(const ModelSpec& model, double u_target, double beta,
                                 double horizon) {
  model.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (u_target == 0.0) throw std::invalid_argument("jump optimization needs u_target != 0");
  ModelSpec m = model;
  m.beta = beta;

  RapidDriveSolution out;
  if (m.kind == ModelKind::SpinBoson && m.delta == 0.0) {
    if (u_target < 0.0) {
      throw std::invalid_argument("spin-boson jump optimization expects u_target > 0");
    }
    out.zeta = 0.75 * u_target;
    // (5L - 4 uT) coth(beta L) - beta L (L - uT) csch^2(beta L) = 0 on (0, uT)
    auto f = [&](double lam) {
      const double sh = std::sinh(beta * lam);
      const double ch = std::cosh(beta * lam);
      return (5.0 * lam - 4.0 * u_target) * ch / sh -
             beta * lam * (lam - u_target) / (sh * sh);
    };
    const int scan = 1000;
    const double lo = 1e-6 * u_target;
    const double hi = u_target * (1.0 - 1e-6);
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_dist = std::numeric_limits<double>::infinity();
    const double prefer = 0.8 * u_target;
    double prev_u = lo, prev_f = f(lo);
    for (int i = 1; i <= scan; ++i) {
      const double u = lo + (hi - lo) * i / scan;
      const double fu = f(u);
      if ((prev_f < 0.0) != (fu < 0.0)) {
        const double root = bisect(f, prev_u, u, prev_f, 1e-12);
        if (std::fabs(root - prefer) < best_dist) {
          best_dist = std::fabs(root - prefer);
          best = root;
        }
      }
      prev_u = u;
      prev_f = fu;
    }
    if (!std::isfinite(best)) {
      throw std::runtime_error("no sign change found for the fluctuation jump condition");
    }
    out.lambda_jump = best;
  } else {
    const Vec4 pi0 = gibbs_vector(m, 0.0);
    const double lo = std::min(0.0, u_target);
    const double hi = std::max(0.0, u_target);
    out.zeta = stationary_point(
        [&](double u) { return (u_target - u) * rgb_coefficients(m, u, pi0).r; }, lo, hi,
        0.75 * u_target);
    out.lambda_jump = stationary_point(
        [&](double u) {
          const RgbCoefficients c = rgb_coefficients(m, u, pi0);
          const double gap = u_target - u;
          return gap * gap * c.g + gap * c.b * u;
        },
        lo, hi, 0.8 * u_target);
  }

  // plateau costs over the stated horizon (constant path, integrand exact)
  const auto p = gibbs_populations(m, 0.0);
  const auto q = gibbs_populations(m, u_target);
  const Vec4 pi0 = gibbs_vector(m, 0.0);
  {
    const RgbCoefficients c = rgb_coefficients(m, out.zeta, pi0);
    out.w_diss_at = relative_entropy(p, q) / beta + horizon * (u_target - out.zeta) * c.r;
  }
  {
    const RgbCoefficients c = rgb_coefficients(m, out.lambda_jump, pi0);
    const double gap = u_target - out.lambda_jump;
    out.variance_at = relative_entropy_variance(p, q) / (beta * beta) +
                      horizon * (gap * gap * c.g + gap * c.b * out.lambda_jump);
  }
  return out;
}

}  // namespace qwork
