#pragma once

#include <span>

#include "dprime/model.hpp"

namespace dprime {

/// out[t] = Sum_s weights[s] * exp(i * alphas[t] * nodes[s]).
///
/// This is the inner kernel of every oscillatory quadrature in the repo. Each
/// target accumulates in fixed node order, so the parallel version is bitwise
/// identical to the serial one for any thread count.
void phase_sum_serial(std::span<const double> nodes, std::span<const Complex> weights,
                      std::span<const double> alphas, std::span<Complex> out);

/// OpenMP version, parallel over targets.
void phase_sum(std::span<const double> nodes, std::span<const Complex> weights,
               std::span<const double> alphas, std::span<Complex> out);

}  // namespace dprime
