#include "dprime/specfun.hpp"

#include <cmath>
#include <numbers>

namespace dprime {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

// Double-double helpers: exact products via fma and a compensated sum, enough
// to keep the phase of exp(-z^2) accurate when |z|^2 is large.
struct DD {
    double hi, lo;
};

DD two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

DD dd_add(DD a, DD b) {
    const double s = a.hi + b.hi;
    const double v = s - a.hi;
    const double e = (a.hi - (s - v)) + (b.hi - v) + a.lo + b.lo;
    return {s, e};
}

// exp(-z^2) with the real part of the exponent clamped so the result stays
// finite (saturation on overflow), and the imaginary part reduced mod 2 pi in
// double-double arithmetic.
Complex exp_minus_z2(Complex z) {
    const double x = z.real(), y = z.imag();
    // -z^2 = (y^2 - x^2) - 2 i x y
    const DD re = dd_add(two_prod(y, y), two_prod(-x, x));
    DD im = two_prod(-2.0 * x, y);
    static const DD kTwoPi{6.283185307179586, 2.4492935982947064e-16};
    const double n = std::nearbyint(im.hi / kTwoPi.hi);
    im = dd_add(im, dd_add(two_prod(-n, kTwoPi.hi), two_prod(-n, kTwoPi.lo)));
    double re_clamped = re.hi;
    if (re_clamped > 708.0) re_clamped = 708.0;
    const double mag = std::exp(re_clamped) * (re_clamped < 708.0 ? (1.0 + re.lo) : 1.0);
    const double ph = im.hi + im.lo;
    return {mag * std::cos(ph), mag * std::sin(ph)};
}

// Laplace continued fraction, valid for large |z| in the upper half plane.
Complex faddeeva_cf(Complex z, int depth) {
    Complex f = z;
    for (int m = depth; m >= 1; --m) f = z - (0.5 * m) / f;
    return kI / (std::sqrt(kPi) * f);
}

// Pole-corrected midpoint rule on the defining integral, |z| < 8, Im z >= 0.
//
//   w(z) = (2ihz/pi) Sum_j exp(-t_j^2) / (z^2 - t_j^2)
//          + 2 exp(-z^2) / (1 + exp(-2 pi i z / h)),   t_j = (j + 1/2) h,
//
// with error O(exp(-pi^2/h^2)). The correction term is the full residue
// series, which requires Im z < pi/h; both step sizes keep pi/h > 9, above
// every point of the region. Near a real z equal to a node the two parts
// cancel a pole; of the two step sizes we use the one whose nodes are farther
// from Re z, which keeps the cancellation benign.
Complex faddeeva_midpoint(Complex z) {
    static constexpr double kSteps[2] = {0.345, 0.31};
    const double ax = std::abs(z.real());
    double best_h = kSteps[0];
    double best_d = -1.0;
    for (double h : kSteps) {
        const double frac = ax / h - std::floor(ax / h);
        const double d = std::abs(frac - 0.5) * h;
        if (d > best_d) {
            best_d = d;
            best_h = h;
        }
    }
    const double h = best_h;
    const Complex z2 = z * z;
    Complex sum{0.0, 0.0};
    for (int j = 0;; ++j) {
        const double t = (j + 0.5) * h;
        if (t > 8.7) break;
        sum += std::exp(-t * t) / (z2 - t * t);
    }
    const Complex s = (2.0 * kI * h / kPi) * z * sum;
    const Complex corr = 2.0 * exp_minus_z2(z) / (1.0 + std::exp(-2.0 * kPi * kI * z / h));
    return s + corr;
}

Complex faddeeva_upper(Complex z) {
    const double rho = std::hypot(z.real(), z.imag());
    if (rho >= 8.0) {
        const int depth = rho >= 64.0 ? 12 : rho >= 24.0 ? 24 : 48;
        return faddeeva_cf(z, depth);
    }
    return faddeeva_midpoint(z);
}

}  // namespace

Complex faddeeva(Complex z) {
    if (z.imag() >= 0.0) return faddeeva_upper(z);
    return 2.0 * exp_minus_z2(z) - faddeeva_upper(-z);
}

Complex gaussian_halfline(Complex a, Complex c) {
    if (!(a.real() > 0.0))
        throw std::domain_error("gaussian_halfline: Re a must be > 0 for convergence");
    const Complex ra = std::sqrt(a);  // principal branch, Re > 0
    return 0.5 * std::sqrt(kPi) / ra * faddeeva(-kI * c / (2.0 * ra));
}

Complex halfline_transform(const ModelParams& params, const CoherentState& state, int s,
                           Complex mu) {
    const double hbar = params.hbar;
    const double q = state.center.q;
    const double p = state.center.p;
    const Complex a = state.sigma_breve / (4.0 * hbar * state.sigma);
    const Complex norm = std::pow(2.0 * kPi * hbar, -0.25) / std::sqrt(state.sigma) *
                         std::exp(Complex{0.0, state.phase});
    const Complex pre = norm * std::exp(-a * (q * q) - kI * (p * q / hbar));
    const Complex c0 = static_cast<double>(s) * (2.0 * a * q + kI * (p / hbar));
    return pre * gaussian_halfline(a, mu + c0);
}

Complex signed_abs_overlap(const ModelParams& params, const CoherentState& state, double kappa) {
    const Complex mu = kI * std::abs(kappa);
    return halfline_transform(params, state, +1, mu) - halfline_transform(params, state, -1, mu);
}

Complex plane_wave_overlap(const ModelParams& params, const CoherentState& state, double kappa,
                           int s) {
    const Complex mu = kI * (static_cast<double>(s) * kappa);
    return halfline_transform(params, state, +1, mu) + halfline_transform(params, state, -1, -mu);
}

}  // namespace dprime
