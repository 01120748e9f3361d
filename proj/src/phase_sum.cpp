#include "dprime/phase_sum.hpp"

#include <cmath>
#include <cstddef>

namespace dprime {

namespace {

inline Complex accumulate_target(std::span<const double> nodes, std::span<const Complex> weights,
                                 double alpha) {
    double re = 0.0, im = 0.0;
    const std::size_t n = nodes.size();
    for (std::size_t s = 0; s < n; ++s) {
        const double ph = alpha * nodes[s];
        const double c = std::cos(ph);
        const double sn = std::sin(ph);
        const double wr = weights[s].real();
        const double wi = weights[s].imag();
        re += wr * c - wi * sn;
        im += wr * sn + wi * c;
    }
    return {re, im};
}

}  // namespace

void phase_sum_serial(std::span<const double> nodes, std::span<const Complex> weights,
                      std::span<const double> alphas, std::span<Complex> out) {
    if (nodes.size() != weights.size() || alphas.size() != out.size())
        throw std::invalid_argument("phase_sum: size mismatch");
    for (std::size_t t = 0; t < alphas.size(); ++t)
        out[t] = accumulate_target(nodes, weights, alphas[t]);
}

void phase_sum(std::span<const double> nodes, std::span<const Complex> weights,
               std::span<const double> alphas, std::span<Complex> out) {
    if (nodes.size() != weights.size() || alphas.size() != out.size())
        throw std::invalid_argument("phase_sum: size mismatch");
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(alphas.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < m; ++t)
        out[t] = accumulate_target(nodes, weights, alphas[t]);
}

}  // namespace dprime
