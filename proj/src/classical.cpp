#include "dprime/classical.hpp"

#include <cmath>

#include "dprime/spectral.hpp"

namespace dprime {

namespace {

const Complex kI{0.0, 1.0};

// 2|p| / (m B(p)) = 2 / (m b |p|); the prefactor of the odd part is
// 1 / (1 + i s c) with this c and an operator-dependent sign s. b = 0 sends
// c to infinity, so the prefactor is 0 (free motion); B = infinity gives c = 0.
bool odd_prefactor(const ClassicalCoupling& coupling, double mass, double p, double s,
                   Complex* out) {
    if (coupling.infinite) {
        *out = Complex{1.0, 0.0};
        return true;
    }
    if (coupling.b == 0.0 || p == 0.0) return false;
    const double c = 2.0 / (mass * coupling.b * std::abs(p));
    *out = 1.0 / Complex{1.0, s * c};
    return true;
}

void require_off_axis(PhasePoint xi, const char* who) {
    if (xi.q * xi.p == 0.0)
        throw std::domain_error(std::string(who) + ": requires q p != 0");
}

}  // namespace

ClassicalCoupling ClassicalCoupling::from_params(const ModelParams& params) {
    if (std::isinf(params.beta)) return full_reflection();
    return finite(params.classical_coupling());
}

Complex flow_apply(const ClassicalCoupling& coupling, double mass, const PhaseFunction& f,
                   double t, PhasePoint xi) {
    const PhasePoint shifted{xi.q - xi.p * t / mass, xi.p};
    const Complex free_value = f(shifted);
    const double gate = heaviside(t * xi.q * xi.p) *
                        heaviside(std::abs(xi.p * t) / mass - std::abs(xi.q));
    if (gate == 0.0) return free_value;
    Complex pref;
    if (!odd_prefactor(coupling, mass, xi.p, sign_of(t), &pref)) return free_value;
    return free_value - pref * (free_value - f(-shifted));
}

Complex classical_wave(const ClassicalCoupling& coupling, double mass, int sign,
                       const PhaseFunction& f, PhasePoint xi) {
    const Complex value = f(xi);
    if (heaviside(-sign * xi.q * xi.p) == 0.0) return value;
    Complex pref;
    if (!odd_prefactor(coupling, mass, xi.p, static_cast<double>(sign), &pref)) return value;
    return value - pref * (value - f(-xi));
}

Complex classical_wave_reverse(const ClassicalCoupling& coupling, double mass, int sign,
                               const PhaseFunction& f, PhasePoint xi) {
    const Complex value = f(xi);
    if (heaviside(-sign * xi.q * xi.p) == 0.0) return value;
    Complex pref;
    if (!odd_prefactor(coupling, mass, xi.p, -static_cast<double>(sign), &pref)) return value;
    return value - pref * (value - f(-xi));
}

Complex classical_scatter(const ClassicalCoupling& coupling, double mass, const PhaseFunction& f,
                          PhasePoint xi) {
    const Complex value = f(xi);
    Complex pref;
    if (!odd_prefactor(coupling, mass, xi.p, -1.0, &pref)) return value;
    return value - pref * (value - f(-xi));
}

WaveSample semiclassical_dynamics(const ModelParams& params, const CoherentState& initial,
                                  double t, const GridSpec& grid) {
    params.validate();
    initial.validate();
    require_off_axis(initial.center, "semiclassical_dynamics");
    const double q = initial.center.q, p = initial.center.p;
    const CoherentState evolved = free_evolve_state(params, initial, t);
    WaveSample out = sample_state(params, evolved, grid);
    if (params.beta == 0.0) return out;

    const double qp = q * p;
    const double tau = t + params.mass * q / p;  // t - t_coll
    Complex weight{0.0, 0.0};
    if (heaviside(-qp) * heaviside(tau) != 0.0)
        weight = sign_of(q) * reflection_coeff(params, -1, p / params.hbar);
    else if (heaviside(qp) * heaviside(-tau) != 0.0)
        weight = sign_of(q) * reflection_coeff(params, +1, p / params.hbar);
    else
        return out;

    const WaveSample mirror = reflect(out);
    for (int i = 0; i < grid.n; ++i)
        out.values[i] -= weight * (out.values[i] - mirror.values[i]);
    return out;
}

WaveSample semiclassical_waveop(const ModelParams& params, int sign,
                                const CoherentState& initial, const GridSpec& grid) {
    params.validate();
    initial.validate();
    require_off_axis(initial.center, "semiclassical_waveop");
    const double q = initial.center.q, p = initial.center.p;
    WaveSample out = sample_state(params, initial, grid);
    if (params.beta == 0.0) return out;
    if (heaviside(-sign * q * p) == 0.0) return out;
    const Complex weight = sign_of(q) * reflection_coeff(params, sign, p / params.hbar);
    const WaveSample mirror = reflect(out);
    for (int i = 0; i < grid.n; ++i)
        out.values[i] += weight * (out.values[i] - mirror.values[i]);
    return out;
}

WaveSample semiclassical_scatter(const ModelParams& params, const CoherentState& initial,
                                 const GridSpec& grid) {
    params.validate();
    initial.validate();
    require_off_axis(initial.center, "semiclassical_scatter");
    const double p = initial.center.p;
    WaveSample out = sample_state(params, initial, grid);
    if (params.beta == 0.0) return out;
    const Complex weight = sign_of(p) * reflection_coeff(params, -1, p / params.hbar);
    const WaveSample mirror = reflect(out);
    for (int i = 0; i < grid.n; ++i)
        out.values[i] += weight * (out.values[i] - mirror.values[i]);
    return out;
}

}  // namespace dprime
