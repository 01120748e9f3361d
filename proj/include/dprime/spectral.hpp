#pragma once

#include <optional>

#include "dprime/model.hpp"

namespace dprime {

/// Spectral summary of the point-interaction Hamiltonian: a single negative
/// eigenvalue exists iff beta < 0 (finite).
struct SpectralData {
    ModelParams params;
    std::optional<double> bound_energy;

    static SpectralData of(const ModelParams& params);
};

/// Reflection amplitude R_+(k) (sign = +1) or R_-(k) (sign = -1),
/// R_pm(k) = +/- k / (|k| -/+ i hbar^2/(m beta)).
/// beta = 0 gives 0, beta = +/-inf gives +/-sgn(k). Throws std::domain_error
/// for k = 0 (the generalized eigenfunctions are indexed by k != 0).
Complex reflection_coeff(const ModelParams& params, int sign, double k);

/// Generalized eigenfunction phi_k^{+/-}(x) = e^{ikx}/sqrt(2 pi)
/// + R_pm(k) sgn(x) e^{-/+ i|k||x|}/sqrt(2 pi).
Complex eigenfunction_eval(const ModelParams& params, int sign, double k, double x);

/// lambda_beta = -hbar^6 / (2 m^3 beta^2); requires beta < 0 (finite).
double bound_eigenvalue(const ModelParams& params);

/// Normalized odd bound state phi_beta(x) = (hbar/sqrt(m|beta|)) sgn(x)
/// exp(-hbar^2 |x| / (m |beta|)); requires beta < 0 (finite).
double bound_state_eval(const ModelParams& params, double x);

/// <phi_beta, psi> in closed form (two half-line Gaussian integrals).
Complex bound_overlap(const ModelParams& params, const CoherentState& state);

/// (F_+ psi)(k) = psihat(k) + conj(R_+(k)) (2 pi)^{-1/2} Int sgn(y) e^{i|k||y|} psi(y) dy,
/// fully closed-form. Throws std::domain_error for k = 0.
Complex gen_transform_plus(const ModelParams& params, const CoherentState& state, double k);

}  // namespace dprime
