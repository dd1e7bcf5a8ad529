#include "qwork/model.hpp"

#include <cmath>

namespace qwork {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite ") + what);
  }
}

Mat4 commutator_part(double u, double delta) {
  Mat4 c;
  c(0, 3) = 2.0 * delta;
  c(1, 3) = -2.0 * delta;
  c(2, 3) = 2.0 * u;
  c(3, 0) = -delta;
  c(3, 1) = delta;
  c(3, 2) = -2.0 * u;
  return c;
}

struct SbRates {
  double e = 0.0;      // energy gap
  double up = 0.0, down = 0.0;
  double dup = 0.0, ddown = 0.0;  // d/dE
};

SbRates sb_rates(const ModelSpec& m, double u) {
  SbRates r;
  r.e = std::hypot(u, m.delta);
  if (r.e == 0.0) return r;
  const double occ = 1.0 / std::expm1(2.0 * m.beta * r.e);  // Bose-Einstein
  const double g = m.k * r.e * r.e * r.e;
  const double gp = 3.0 * m.k * r.e * r.e;
  const double occp = -2.0 * m.beta * occ * (occ + 1.0);
  r.up = g * occ;
  r.down = g * (occ + 1.0);
  r.dup = gp * occ + g * occp;
  r.ddown = gp * (occ + 1.0) + g * occp;
  return r;
}

}  // namespace

void ModelSpec::validate() const {
  require_finite(delta, "delta");
  require_finite(k, "k");
  require_finite(gamma_tunnel, "gamma_tunnel");
  require_finite(beta, "beta");
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  if (kind == ModelKind::SpinBoson) {
    if (k <= 0.0) throw std::invalid_argument("spin-boson rate prefactor k must be positive");
  } else {
    if (gamma_tunnel <= 0.0) throw std::invalid_argument("quantum-dot gamma must be positive");
    if (delta != 0.0) throw std::invalid_argument("quantum dot requires delta = 0");
  }
}

ModelSpec spin_boson(double delta, double beta, double k) {
  ModelSpec m;
  m.kind = ModelKind::SpinBoson;
  m.delta = delta;
  m.beta = beta;
  m.k = k;
  m.validate();
  return m;
}

ModelSpec quantum_dot(double gamma_tunnel, double beta) {
  ModelSpec m;
  m.kind = ModelKind::QuantumDot;
  m.gamma_tunnel = gamma_tunnel;
  m.beta = beta;
  m.validate();
  return m;
}

RatePair rates(const ModelSpec& model, double u) {
  model.validate();
  require_finite(u, "control value");
  RatePair out;
  if (model.kind == ModelKind::QuantumDot) {
    out.gamma_up = model.gamma_tunnel / (1.0 + std::exp(2.0 * model.beta * u));
    out.gamma_down = model.gamma_tunnel / (1.0 + std::exp(-2.0 * model.beta * u));
    out.gamma_sum = model.gamma_tunnel;
    return out;
  }
  const SbRates r = sb_rates(model, u);
  out.gamma_up = r.up;
  out.gamma_down = r.down;
  out.gamma_sum = r.up + r.down;
  return out;
}

namespace {

// Accumulates w0 * z^T into rows 0..2 of m, with row 1 forced to the exact
// negative of row 0 (w vectors here always satisfy w1 = -w0, which keeps the
// trace annihilation of the dissipator exact in floating point).
inline void add_outer_traceless(Mat4& m, const Vec4& w, const Vec4& z) {
  for (int j = 0; j < 4; ++j) {
    const double top = w[0] * z[j];
    m(0, j) += top;
    m(1, j) -= top;
    m(2, j) += w[2] * z[j];
  }
}

}  // namespace

void generator_pair(const ModelSpec& model, double u, Mat4& a, Mat4* da) {
  a = commutator_part(u, model.delta);
  if (da) {
    *da = Mat4{};
    (*da)(2, 3) = 2.0;
    (*da)(3, 2) = -2.0;
  }

  if (model.kind == ModelKind::QuantumDot) {
    const double f = 1.0 / (1.0 + std::exp(2.0 * model.beta * u));
    const double g = model.gamma_tunnel;
    const double up = g * f;
    const double down = g - up;
    a(0, 0) += -up;  a(0, 1) += down;
    a(1, 0) += up;   a(1, 1) += -down;
    a(2, 2) += -0.5 * g;
    a(3, 3) += -0.5 * g;
    if (da) {
      const double dup = -2.0 * model.beta * g * f * (1.0 - f);
      // gamma_sum is constant, so the coherence block has no derivative
      (*da)(0, 0) += -dup; (*da)(0, 1) += -dup;
      (*da)(1, 0) += dup;  (*da)(1, 1) += dup;
    }
    return;
  }

  const SbRates r = sb_rates(model, u);
  if (r.e == 0.0) return;  // rates vanish as E^2; only the commutator is left

  const double c = u / r.e;
  const double s = model.delta / r.e;
  const double gsum = r.up + r.down;

  // dissipator F L T written as two outer products:
  //   D = (F q)(r^T T) - (gamma_sum/2) [ f2 t2^T + e3 e3^T ]
  // with q = [-1,1,0,0], r = [up,-down,0,0], f2/t2 the coherence columns/rows
  // of the two rotations.
  const Vec4 fq{{-c, c, s, 0.0}};
  const Vec4 rt{{0.5 * (r.up * (1.0 + c) - r.down * (1.0 - c)),
                 0.5 * (r.up * (1.0 - c) - r.down * (1.0 + c)), -gsum * s, 0.0}};
  const Vec4 f2{{s, -s, c, 0.0}};
  const Vec4 coh{{0.5 * s, -0.5 * s, c, 0.0}};

  add_outer_traceless(a, fq, rt);
  {
    const double w = -0.5 * gsum;
    for (int j = 0; j < 4; ++j) {
      const double top = w * f2[0] * coh[j];
      a(0, j) += top;
      a(1, j) -= top;
      a(2, j) += w * f2[2] * coh[j];
    }
    a(3, 3) += w;
  }

  if (da) {
    const double de = u / r.e;
    const double dc = model.delta * model.delta / (r.e * r.e * r.e);
    const double ds = -u * model.delta / (r.e * r.e * r.e);
    const double up_u = de * r.dup;
    const double down_u = de * r.ddown;
    const double gsum_u = up_u + down_u;

    const Vec4 dfq{{-dc, dc, ds, 0.0}};
    const Vec4 drt{{0.5 * ((1.0 + c) * up_u - (1.0 - c) * down_u + dc * gsum),
                    0.5 * ((1.0 - c) * up_u - (1.0 + c) * down_u - dc * gsum),
                    -(gsum_u * s + gsum * ds), 0.0}};
    const Vec4 df2{{ds, -ds, dc, 0.0}};
    const Vec4 dcoh{{0.5 * ds, -0.5 * ds, dc, 0.0}};

    add_outer_traceless(*da, dfq, rt);
    add_outer_traceless(*da, fq, drt);
    for (int j = 0; j < 4; ++j) {
      const double top = -0.5 * (gsum_u * f2[0] * coh[j] + gsum * (df2[0] * coh[j] + f2[0] * dcoh[j]));
      (*da)(0, j) += top;
      (*da)(1, j) -= top;
      (*da)(2, j) +=
          -0.5 * (gsum_u * f2[2] * coh[j] + gsum * (df2[2] * coh[j] + f2[2] * dcoh[j]));
    }
    (*da)(3, 3) += -0.5 * gsum_u;
  }
}

GeneratorMatrix generator(const ModelSpec& model, double u) {
  model.validate();
  require_finite(u, "control value");
  Mat4 a;
  generator_pair(model, u, a, nullptr);
  return a;
}

GeneratorMatrix generator_derivative(const ModelSpec& model, double u) {
  model.validate();
  require_finite(u, "control value");
  Mat4 a, da;
  generator_pair(model, u, a, &da);
  for (double v : da.d) {
    if (!std::isfinite(v)) {
      throw std::domain_error("non-finite generator derivative at u = " + std::to_string(u));
    }
  }
  return da;
}

Vec4 gibbs_vector(const ModelSpec& model, double u) {
  model.validate();
  require_finite(u, "control value");
  Vec4 x;
  if (model.kind == ModelKind::QuantumDot) {
    x[0] = 1.0 / (1.0 + std::exp(-2.0 * model.beta * u));
    x[1] = 1.0 / (1.0 + std::exp(2.0 * model.beta * u));
    return x;
  }
  const double e = std::hypot(u, model.delta);
  if (e == 0.0) {
    x[0] = 0.5;
    x[1] = 0.5;
    return x;
  }
  const double c = u / e;
  const double s = model.delta / e;
  const double pg = 1.0 / (1.0 + std::exp(-2.0 * model.beta * e));
  const double pe = 1.0 / (1.0 + std::exp(2.0 * model.beta * e));
  x[0] = 0.5 * (1.0 + c) * pg + 0.5 * (1.0 - c) * pe;
  x[1] = 0.5 * (1.0 - c) * pg + 0.5 * (1.0 + c) * pe;
  x[2] = 0.5 * s * (pe - pg);
  x[3] = 0.0;
  return x;
}

double free_energy(const ModelSpec& model, double u) {
  model.validate();
  require_finite(u, "control value");
  const double e = std::hypot(u, model.delta);
  // -log(2 cosh(beta E))/beta without overflow at large beta E
  return -e - std::log1p(std::exp(-2.0 * model.beta * e)) / model.beta;
}

double terminal_adjoint(const ModelSpec& model, double u_final, double u_target,
                        double alpha, double kappa) {
  model.validate();
  require_finite(u_final, "terminal control");
  require_finite(u_target, "control target");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (kappa < 0.0) throw std::invalid_argument("kappa must be nonnegative");
  const double e = std::hypot(u_final, model.delta);
  const double dfree = e > 0.0 ? std::tanh(model.beta * e) * u_final / e : 0.0;
  return (1.0 - alpha) * dfree + kappa * (u_final - u_target);
}

}  // namespace qwork
