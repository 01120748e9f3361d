#include "dprime/spectral.hpp"

#include <cmath>
#include <numbers>

#include "dprime/specfun.hpp"

namespace dprime {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

bool has_bound_state(const ModelParams& params) {
    return params.beta < 0.0 && std::isfinite(params.beta);
}
}  // namespace

SpectralData SpectralData::of(const ModelParams& params) {
    params.validate();
    SpectralData data{params, std::nullopt};
    if (has_bound_state(params)) data.bound_energy = bound_eigenvalue(params);
    return data;
}

Complex reflection_coeff(const ModelParams& params, int sign, double k) {
    if (k == 0.0) throw std::domain_error("reflection_coeff: k = 0 is excluded");
    if (params.beta == 0.0) return {0.0, 0.0};
    const double s = static_cast<double>(sign);
    if (std::isinf(params.beta)) return Complex{s * sign_of(k), 0.0};
    const double zeta = params.hbar * params.hbar / (params.mass * params.beta);
    return s * k / Complex{std::abs(k), -s * zeta};
}

Complex eigenfunction_eval(const ModelParams& params, int sign, double k, double x) {
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    const Complex plane = std::exp(kI * (k * x)) * norm;
    if (params.beta == 0.0) return plane;
    const double s = static_cast<double>(sign);
    const Complex scattered = reflection_coeff(params, sign, k) * sign_of(x) *
                              std::exp(-s * kI * (std::abs(k) * std::abs(x))) * norm;
    return plane + scattered;
}

double bound_eigenvalue(const ModelParams& params) {
    if (!has_bound_state(params))
        throw std::domain_error("bound_eigenvalue: no bound state unless beta < 0");
    const double h = params.hbar, m = params.mass, b = params.beta;
    return -std::pow(h, 6) / (2.0 * m * m * m * b * b);
}

double bound_state_eval(const ModelParams& params, double x) {
    if (!has_bound_state(params))
        throw std::domain_error("bound_state_eval: no bound state unless beta < 0");
    const double rate = params.hbar * params.hbar / (params.mass * std::abs(params.beta));
    const double amp = params.hbar / std::sqrt(params.mass * std::abs(params.beta));
    return amp * sign_of(x) * std::exp(-rate * std::abs(x));
}

Complex bound_overlap(const ModelParams& params, const CoherentState& state) {
    if (!has_bound_state(params))
        throw std::domain_error("bound_overlap: no bound state unless beta < 0");
    const double rate = params.hbar * params.hbar / (params.mass * std::abs(params.beta));
    const double amp = params.hbar / std::sqrt(params.mass * std::abs(params.beta));
    const Complex mu{-rate, 0.0};
    return amp * (halfline_transform(params, state, +1, mu) -
                  halfline_transform(params, state, -1, mu));
}

Complex gen_transform_plus(const ModelParams& params, const CoherentState& state, double k) {
    if (k == 0.0) throw std::domain_error("gen_transform_plus: k = 0 is excluded");
    Complex out = coherent_ft(params, state, k);
    if (params.beta != 0.0) {
        out += std::conj(reflection_coeff(params, +1, k)) / std::sqrt(2.0 * kPi) *
               signed_abs_overlap(params, state, k);
    }
    return out;
}

}  // namespace dprime
