#pragma once

#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dprime/model.hpp"
#include "dprime/spectral.hpp"

namespace dprime {

/// Raised when a k-quadrature cannot satisfy its node rules (never a silent
/// NaN); the message names the violated rule.
class QuadratureError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tuning knobs for every oscillatory k-quadrature.
struct QuadratureOptions {
    /// Half-width of Gaussian-decay windows, in units of the momentum-space
    /// packet scale |sigma_breve| / sqrt(hbar).
    double window_sigmas = 12.0;
    /// Window extension for integrands with algebraic tails (E1 and the
    /// spectral validation path).
    double tail_sigmas = 40.0;
    /// Nodes per momentum-space packet scale.
    double mesh_factor = 16.0;
    /// Maximum oscillation per node from any phase factor (quadratic chirp or
    /// e^{ikx} at the farthest target).
    double phase_step = std::numbers::pi / 4.0;
    /// Hard cap on total quadrature nodes; exceeding it raises QuadratureError.
    long nk_cap = 1L << 21;
    /// Terms whose analytic amplitude bound falls below this are returned as
    /// exact zeros (the bound is recorded in the diagnostics).
    double skip_threshold = 1e-30;
};

/// Per-call quadrature report.
struct QuadDiag {
    long nodes_used = 0;
    double tail_estimate = 0.0;

    void absorb(const QuadDiag& other) {
        nodes_used += other.nodes_used;
        tail_estimate += other.tail_estimate;
    }
};

/// k-window descriptor centered on the packet momentum.
struct QuadratureSpec {
    double k_center = 0.0;
    double k_halfwidth = 0.0;
    long n_k = 0;
    bool includes_mirror = false;

    /// Node rule from the options: packet mesh + chirp phase rule + target
    /// phase rule (alpha_max = farthest |x| target).
    static QuadratureSpec gaussian_window(const ModelParams& params, const CoherentState& state,
                                          double t, double alpha_max,
                                          const QuadratureOptions& opts);
    /// True when the chirp phase hbar t k^2 / (2m) moves by less than
    /// opts.phase_step between adjacent nodes everywhere in the window.
    bool phase_rule_ok(const ModelParams& params, double t, const QuadratureOptions& opts) const;
};

/// F_{pm,t}(x) = (2 pi)^{-1/2} Int e^{-i hbar t k^2/(2m)} e^{ikx} R_pm(k) psihat(k) dk.
Complex F_pm_t(const ModelParams& params, const CoherentState& state, int sign, double t,
               double x, const QuadratureOptions& opts = {}, QuadDiag* diag = nullptr);
std::vector<Complex> F_pm_t_many(const ModelParams& params, const CoherentState& state, int sign,
                                 double t, std::span<const double> xs,
                                 const QuadratureOptions& opts = {}, QuadDiag* diag = nullptr);

/// Error terms of the exact-propagator decomposition. E1 and E2 require
/// q p != 0; E_beta is closed form (identically zero for beta >= 0).
Complex error_term_E1(const ModelParams& params, const CoherentState& state, double t, double x,
                      const QuadratureOptions& opts = {}, QuadDiag* diag = nullptr);
std::vector<Complex> error_term_E1_many(const ModelParams& params, const CoherentState& state,
                                        double t, std::span<const double> xs,
                                        const QuadratureOptions& opts = {},
                                        QuadDiag* diag = nullptr);
Complex error_term_E2(const ModelParams& params, const CoherentState& state, double t, double x,
                      const QuadratureOptions& opts = {}, QuadDiag* diag = nullptr);
std::vector<Complex> error_term_E2_many(const ModelParams& params, const CoherentState& state,
                                        double t, std::span<const double> xs,
                                        const QuadratureOptions& opts = {},
                                        QuadDiag* diag = nullptr);
Complex error_term_Ebeta(const ModelParams& params, const CoherentState& state, double t,
                         double x);

/// Gated oscillatory remainder of the wave-operator expansion; q p != 0.
Complex error_term_E3(const ModelParams& params, int sign, const CoherentState& state, double x,
                      const QuadratureOptions& opts = {}, QuadDiag* diag = nullptr);
std::vector<Complex> error_term_E3_many(const ModelParams& params, int sign,
                                        const CoherentState& state, std::span<const double> xs,
                                        const QuadratureOptions& opts = {},
                                        QuadDiag* diag = nullptr);

/// Exact evolution e^{-i t H_beta / hbar} psi on the grid, assembled from the
/// closed-form free part, the folded F_{pm,t} terms, E1, E2 and E_beta.
WaveSample evolve_exact(const ModelParams& params, const CoherentState& state, double t,
                        const GridSpec& grid, const QuadratureOptions& opts = {},
                        QuadDiag* diag = nullptr);

/// Same state at arbitrary targets. The evolved state generically jumps at
/// x = 0 (the point-interaction domain condition), so norm computations split
/// the line there and use targets slightly off the origin.
std::vector<Complex> evolve_exact_at(const ModelParams& params, const CoherentState& state,
                                     double t, std::span<const double> xs,
                                     const QuadratureOptions& opts = {}, QuadDiag* diag = nullptr);

/// Independent route: direct quadrature of the eigenfunction expansion
/// Int e^{-i hbar t k^2/(2m)} phi_k^+(x) (F_+ psi)(k) dk plus the bound-state
/// term. Used to cross-check evolve_exact.
WaveSample evolve_spectral(const ModelParams& params, const CoherentState& state, double t,
                           const GridSpec& grid, const QuadratureOptions& opts = {},
                           QuadDiag* diag = nullptr);

/// Wave operator Omega_beta^{pm} psi by direct k-quadrature of
/// psi(x) + sgn(x) (2 pi)^{-1/2} Int e^{-/+ i|k||x|} R_pm(k) psihat(k) dk.
WaveSample wave_op_apply(const ModelParams& params, int sign, const CoherentState& state,
                         const GridSpec& grid, const QuadratureOptions& opts = {},
                         QuadDiag* diag = nullptr);

/// Same operator through its gated expansion: psi + theta-gated folded
/// F_{pm,0} terms + E3.
WaveSample wave_op_via_split(const ModelParams& params, int sign, const CoherentState& state,
                             const GridSpec& grid, const QuadratureOptions& opts = {},
                             QuadDiag* diag = nullptr);

/// Omega_beta^{pm} applied to an already-sampled function: Fourier transform
/// by x-quadrature (momentum support bounded by k_max), then the folded
/// k-integral. Used to compose operators in validation tests.
WaveSample wave_op_apply_sample(const ModelParams& params, int sign, const WaveSample& g,
                                double k_max, const QuadratureOptions& opts = {},
                                QuadDiag* diag = nullptr);

/// S_beta psi = F^* F_+ Omega^- psi: wave operator, then the F_+ transform by
/// x-quadrature on the grid, then the inverse Fourier transform.
WaveSample scattering_apply(const ModelParams& params, const CoherentState& state,
                            const GridSpec& grid, const QuadratureOptions& opts = {},
                            QuadDiag* diag = nullptr);

/// Int |(F_+ psi)(k)|^2 dk (the absolutely continuous mass of psi).
double acpart_mass(const ModelParams& params, const CoherentState& state,
                   const QuadratureOptions& opts = {}, QuadDiag* diag = nullptr);

}  // namespace dprime
