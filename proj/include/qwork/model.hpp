#pragma once

#include "qwork/linalg.hpp"

#include <stdexcept>
#include <string>

namespace qwork {

// Two physical models share one structure: a driven two-level system with
// Hamiltonian H(u) = u*sigma_z + delta*sigma_x and thermal jump operators in
// the instantaneous eigenbasis. States are vectorized as
// x = [rho_gg, rho_ee, Re rho_eg, Im rho_eg].
enum class ModelKind { SpinBoson, QuantumDot };

struct ModelSpec {
  ModelKind kind = ModelKind::SpinBoson;
  double delta = 0.0;         // coherent sigma_x coupling; must be 0 for the dot
  double k = 1.0;             // spin-boson cubic rate prefactor, gamma(E) = k E^3
  double gamma_tunnel = 1.0;  // quantum-dot lead coupling
  double beta = 1.0;          // inverse temperature

  // throws std::invalid_argument on a bad parameter set
  void validate() const;
};

struct RatePair {
  double gamma_up = 0.0;    // excitation rate
  double gamma_down = 0.0;  // decay rate
  double gamma_sum = 0.0;   // gamma_up + gamma_down
};

using GeneratorMatrix = Mat4;

ModelSpec spin_boson(double delta, double beta, double k = 1.0);
ModelSpec quantum_dot(double gamma_tunnel, double beta);

// Thermal transition rates at control value u.
// Spin-boson: gamma_up = k E^3 P(E), gamma_down = k E^3 (P(E)+1) with the
// Bose-Einstein occupation P(E) = 1/(e^{2 beta E} - 1) and E = sqrt(u^2+delta^2);
// the E -> 0 limit is (0,0,0). Quantum dot: gamma_up = Gamma f(u),
// gamma_down = Gamma (1-f(u)) with f(u) = 1/(1+e^{2 beta u}); gamma_sum is
// exactly Gamma.
RatePair rates(const ModelSpec& model, double u);

// Vectorized Lindblad generator A(u). Rows 0 and 1 sum to zero exactly, so
// explicit Euler conserves the trace of rho.
GeneratorMatrix generator(const ModelSpec& model, double u);

// Analytic dA/du. At the spin-boson point E = 0 the removable singularity is
// filled with its limit (only the commutator derivative survives).
GeneratorMatrix generator_derivative(const ModelSpec& model, double u);

// Builds A and dA/du together, sharing the rate evaluation. da may be null.
void generator_pair(const ModelSpec& model, double u, Mat4& a, Mat4* da);

// Vectorized Gibbs state of H(u) at the model temperature; stationary under
// generator(model, u).
Vec4 gibbs_vector(const ModelSpec& model, double u);

// Equilibrium free energy F(u) = -log(2 cosh(beta E)) / beta, evaluated in
// overflow-safe form.
double free_energy(const ModelSpec& model, double u);

// Terminal costate for the integrated control:
// p(T) = (1-alpha) tanh(beta E_T) u_final/E_T + kappa (u_final - u_target).
double terminal_adjoint(const ModelSpec& model, double u_final, double u_target,
                        double alpha, double kappa);

}  // namespace qwork
