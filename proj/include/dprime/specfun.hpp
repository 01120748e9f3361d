#pragma once

#include "dprime/model.hpp"

namespace dprime {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
///
/// Region split at |z| = 8: inside, a pole-corrected midpoint rule for the
/// defining integral; outside, the Laplace continued fraction. The lower half
/// plane goes through w(z) = 2 exp(-z^2) - w(-z) with the exponential clamped
/// so overflow saturates to a large finite value instead of producing inf.
Complex faddeeva(Complex z);

/// Int_0^inf exp(-a y^2 + c y) dy for Re a > 0, evaluated as
/// (1/2) sqrt(pi/a) w(-i c / (2 sqrt(a))), with no exp*erfc product, so the
/// cancellation-prone regime is handled inside the Faddeeva evaluation.
/// Throws std::domain_error unless Re a > 0.
Complex gaussian_halfline(Complex a, Complex c);

/// The integral Int_0^inf exp(-a y^2 + c y) dy as a value type.
struct HalfLineGaussian {
    Complex a;
    Complex c;
    Complex value() const { return gaussian_halfline(a, c); }
};

/// Int_0^inf e^{mu y} psi(s y) dy for s = +/-1, in closed form through
/// gaussian_halfline.
Complex halfline_transform(const ModelParams& params, const CoherentState& state, int s,
                           Complex mu);

/// Int_R sgn(y) exp(i |kappa| |y|) psi(y) dy.
Complex signed_abs_overlap(const ModelParams& params, const CoherentState& state, double kappa);

/// Int_R exp(i s kappa y) psi(y) dy = sqrt(2 pi) psihat(-s kappa), assembled
/// from the two half-line pieces rather than from coherent_ft.
Complex plane_wave_overlap(const ModelParams& params, const CoherentState& state, double kappa,
                           int s);

}  // namespace dprime
