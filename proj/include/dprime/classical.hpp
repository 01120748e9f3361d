#pragma once

#include <functional>

#include "dprime/model.hpp"

namespace dprime {

/// Coupling of the singular classical generator: B(p) = b p^2 for finite b,
/// B = infinity for the full-reflection extension (1/B := 0).
struct ClassicalCoupling {
    double b = 0.0;
    bool infinite = false;

    static ClassicalCoupling finite(double b) { return {b, false}; }
    static ClassicalCoupling full_reflection() { return {0.0, true}; }
    /// Bridge from the quantum model: b = -2 beta / hbar^3.
    static ClassicalCoupling from_params(const ModelParams& params);

    bool is_free() const { return !infinite && b == 0.0; }
};

using PhaseFunction = std::function<Complex(PhasePoint)>;

/// Backward group e^{-i t L_B}: free pullback minus the gated, weighted odd
/// part. The forward group e^{+i t L_B} is flow_apply with t -> -t.
Complex flow_apply(const ClassicalCoupling& coupling, double mass, const PhaseFunction& f,
                   double t, PhasePoint xi);

/// Classical wave operators W_B^{pm} (pointwise limits of e^{itL_0} e^{-itL_B}).
Complex classical_wave(const ClassicalCoupling& coupling, double mass, int sign,
                       const PhaseFunction& f, PhasePoint xi);

/// Reverse wave operators (limits of e^{itL_B} e^{-itL_0}); these realize the
/// adjoints of W_B^{pm} and invert them pointwise.
Complex classical_wave_reverse(const ClassicalCoupling& coupling, double mass, int sign,
                               const PhaseFunction& f, PhasePoint xi);

/// Classical scattering operator S^cl_B = (W_B^+)^* W_B^-.
Complex classical_scatter(const ClassicalCoupling& coupling, double mass, const PhaseFunction& f,
                          PhasePoint xi);

/// Closed form for e^{i A_t/hbar} (e^{i t L_B} phi_{sigma_t, x})(xi): the free
/// coherent evolution minus the collision-gated, R-weighted odd reflection.
/// Requires q p != 0.
WaveSample semiclassical_dynamics(const ModelParams& params, const CoherentState& initial,
                                  double t, const GridSpec& grid);

/// Closed form for (W_B^{pm} phi_{sigma0, x})(xi). Requires q p != 0.
WaveSample semiclassical_waveop(const ModelParams& params, int sign,
                                const CoherentState& initial, const GridSpec& grid);

/// Closed form for (S^cl_B phi_{sigma0, x})(xi). Requires q p != 0.
WaveSample semiclassical_scatter(const ModelParams& params, const CoherentState& initial,
                                 const GridSpec& grid);

}  // namespace dprime
