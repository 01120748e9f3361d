#include "dprime/propagate.hpp"

#include <algorithm>
#include <cmath>

#include "dprime/phase_sum.hpp"
#include "dprime/specfun.hpp"

namespace dprime {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

double momentum_scale(const ModelParams& params, const CoherentState& state) {
    return std::abs(state.sigma_breve) / std::sqrt(params.hbar);
}

double ft_peak_amp(const ModelParams& params, const CoherentState& state) {
    return std::pow(2.0 * params.hbar / kPi, 0.25) / std::sqrt(std::abs(state.sigma_breve));
}

// Kink scale of R_pm at k = 0; 0 means a pure jump (hard-wall limit) or no
// scattering at all.
double kink_scale(const ModelParams& params) {
    if (params.beta == 0.0 || std::isinf(params.beta)) return 0.0;
    return params.hbar * params.hbar / (params.mass * std::abs(params.beta));
}

// One-sided R_pm value usable at segment endpoints touching k = 0; side says
// which half-line the surrounding segment lives on.
Complex refl_side(const ModelParams& params, int sign, double k, int side) {
    if (params.beta == 0.0) return {0.0, 0.0};
    if (k != 0.0) return reflection_coeff(params, sign, k);
    if (std::isinf(params.beta)) return Complex{static_cast<double>(sign * side), 0.0};
    return {0.0, 0.0};
}

// Quadrature nodes with real Simpson weights; side[j] tags the half-line a
// node belongs to so |k|-kinks stay one-sided.
struct NodeSet {
    std::vector<double> k;
    std::vector<double> w;
    std::vector<signed char> side;
    double tail_estimate = 0.0;

    long size() const { return static_cast<long>(k.size()); }
};

void append_segment(NodeSet& g, double lo, double hi, double dk, long cap) {
    if (!(hi > lo)) return;
    long n = static_cast<long>(std::ceil((hi - lo) / dk)) + 1;
    n = std::max<long>(n, 5);
    if (n % 2 == 0) ++n;
    if (g.size() + n > cap)
        throw QuadratureError("k-quadrature node rule exceeds nk_cap: window [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "] needs " +
                              std::to_string(n) + " more nodes");
    const double h = (hi - lo) / (n - 1);
    const auto w = simpson_weights(static_cast<int>(n), h);
    const signed char side = hi <= 0.0 ? -1 : +1;
    for (long i = 0; i < n; ++i) {
        g.k.push_back(lo + i * h);
        g.w.push_back(w[i]);
        g.side.push_back(side);
    }
}

// Half-line segment with one end at k = 0, refined next to the origin when
// the R kink is finer than the base mesh.
void append_halfline(NodeSet& g, double extent, int direction, double dk, double eps, long cap) {
    if (!(extent > 0.0)) return;
    double k_br = 0.0;
    if (eps > 0.0 && eps < 4.0 * dk)
        k_br = std::min(0.125 * extent, std::max(16.0 * eps, 4.0 * dk));
    if (k_br > 0.0) {
        const double dks = std::max(std::min(eps / 6.0, dk), k_br / 4096.0);
        if (direction > 0) {
            append_segment(g, 0.0, k_br, dks, cap);
            append_segment(g, k_br, extent, dk, cap);
        } else {
            append_segment(g, -extent, -k_br, dk, cap);
            append_segment(g, -k_br, 0.0, dks, cap);
        }
    } else if (direction > 0) {
        append_segment(g, 0.0, extent, dk, cap);
    } else {
        append_segment(g, -extent, 0.0, dk, cap);
    }
}

double dk_rule(const ModelParams& params, const CoherentState& state, double t, double alpha_max,
               double k_absmax, const QuadratureOptions& opts) {
    double dk = momentum_scale(params, state) / opts.mesh_factor;
    if (alpha_max > 0.0) dk = std::min(dk, opts.phase_step / alpha_max);
    const double chirp_rate = params.hbar * std::abs(t) * k_absmax / params.mass;
    if (chirp_rate > 0.0) dk = std::min(dk, opts.phase_step / chirp_rate);
    return dk;
}

Complex chirp(const ModelParams& params, double t, double k) {
    return std::exp(-kI * (params.hbar * t * k * k / (2.0 * params.mass)));
}

// Gaussian window around the packet momentum, split at k = 0 when straddling.
NodeSet packet_window(const ModelParams& params, const CoherentState& state, double t,
                      double alpha_max, const QuadratureOptions& opts) {
    const double kc = state.center.p / params.hbar;
    const double w = opts.window_sigmas * momentum_scale(params, state);
    const double lo = kc - w, hi = kc + w;
    const double dk =
        dk_rule(params, state, t, alpha_max, std::max(std::abs(lo), std::abs(hi)), opts);
    const double eps = kink_scale(params);
    NodeSet g;
    if (lo < 0.0 && hi > 0.0) {
        append_halfline(g, -lo, -1, dk, eps, opts.nk_cap);
        append_halfline(g, hi, +1, dk, eps, opts.nk_cap);
    } else {
        append_segment(g, lo, hi, dk, opts.nk_cap);
    }
    const double gexp = params.hbar / std::norm(state.sigma_breve);
    g.tail_estimate = 2.0 * ft_peak_amp(params, state) * std::exp(-gexp * w * w) /
                      std::max(2.0 * gexp * w, 1e-300);
    return g;
}

// Half-line window starting at k = 0 for the anti-peak integrands.
NodeSet halfline_window(const ModelParams& params, const CoherentState& state, double t,
                        double alpha_max, double extent, int direction,
                        const QuadratureOptions& opts) {
    const double dk = dk_rule(params, state, t, alpha_max, extent, opts);
    NodeSet g;
    append_halfline(g, extent, direction, dk, kink_scale(params), opts.nk_cap);
    return g;
}

std::vector<double> grid_abs(const GridSpec& grid) {
    std::vector<double> out(grid.n);
    for (int i = 0; i < grid.n; ++i) out[i] = std::abs(grid.node(i));
    return out;
}

std::vector<double> negated(std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = -xs[i];
    return out;
}

double max_abs(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
}

void require_scattering_state(const CoherentState& state, const char* who) {
    if (state.center.q * state.center.p == 0.0)
        throw std::domain_error(std::string(who) + ": requires q p != 0");
}

void note(QuadDiag* diag, const NodeSet& g) {
    if (diag) {
        diag->nodes_used += g.size();
        diag->tail_estimate += g.tail_estimate;
    }
}

// Complex weight table over a node set: wts[j] = w[j] * factor(j, k[j], side[j]).
template <typename F>
std::vector<Complex> make_weights(const NodeSet& g, F&& factor) {
    std::vector<Complex> wts(g.k.size());
    for (std::size_t j = 0; j < wts.size(); ++j) wts[j] = g.w[j] * factor(j, g.k[j], g.side[j]);
    return wts;
}

std::vector<Complex> run_phase_sum(const NodeSet& g, std::span<const Complex> weights,
                                   std::span<const double> alphas) {
    std::vector<Complex> out(alphas.size());
    phase_sum(g.k, weights, alphas, out);
    return out;
}

// Int_0^inf |psihat(-sgn(p) k)| dk in closed form; the amplitude scale of the
// anti-peak error terms.
double antipeak_mass(const ModelParams& params, const CoherentState& state) {
    const double g = params.hbar / std::norm(state.sigma_breve);
    const double c = std::abs(state.center.p) / params.hbar;
    return ft_peak_amp(params, state) * 0.5 * std::sqrt(kPi / g) * std::erfc(std::sqrt(g) * c);
}

// D(k) = Int (sgn(y) e^{i|k||y|} - sgn(q) e^{i sgn(q) |k| y}) psi(y) dy, even in k.
Complex e1_inner(const ModelParams& params, const CoherentState& state, double absk) {
    const double sq = sign_of(state.center.q);
    return signed_abs_overlap(params, state, absk) -
           sq * plane_wave_overlap(params, state, absk, static_cast<int>(sq));
}

double e1_skip_bound(const ModelParams& params, const CoherentState& state) {
    const double q = state.center.q;
    return 2.4 * std::exp(-q * q / (4.0 * params.hbar * std::norm(state.sigma)));
}

}  // namespace

// --- QuadratureSpec ----------------------------------------------------------

QuadratureSpec QuadratureSpec::gaussian_window(const ModelParams& params,
                                               const CoherentState& state, double t,
                                               double alpha_max, const QuadratureOptions& opts) {
    QuadratureSpec spec;
    spec.k_center = state.center.p / params.hbar;
    spec.k_halfwidth = opts.window_sigmas * momentum_scale(params, state);
    const double k_absmax = std::abs(spec.k_center) + spec.k_halfwidth;
    const double dk = dk_rule(params, state, t, alpha_max, k_absmax, opts);
    const long n = static_cast<long>(std::ceil(2.0 * spec.k_halfwidth / dk)) + 1;
    long p2 = 1;
    while (p2 < n) p2 <<= 1;
    spec.n_k = p2;
    spec.includes_mirror = spec.k_center - spec.k_halfwidth < 0.0;
    if (spec.n_k > opts.nk_cap)
        throw QuadratureError("QuadratureSpec: n_k " + std::to_string(spec.n_k) +
                              " exceeds nk_cap " + std::to_string(opts.nk_cap));
    return spec;
}

bool QuadratureSpec::phase_rule_ok(const ModelParams& params, double t,
                                   const QuadratureOptions& opts) const {
    const double dk = 2.0 * k_halfwidth / static_cast<double>(n_k - 1);
    const double k_absmax = std::abs(k_center) + k_halfwidth;
    return params.hbar * std::abs(t) * k_absmax * dk / params.mass < opts.phase_step;
}

// --- F_{pm,t} ----------------------------------------------------------------

std::vector<Complex> F_pm_t_many(const ModelParams& params, const CoherentState& state, int sign,
                                 double t, std::span<const double> xs,
                                 const QuadratureOptions& opts, QuadDiag* diag) {
    if (params.beta == 0.0) return std::vector<Complex>(xs.size(), Complex{0.0, 0.0});
    const NodeSet g = packet_window(params, state, t, max_abs(xs), opts);
    note(diag, g);
    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * kPi);
    const auto wts = make_weights(g, [&](std::size_t, double k, int side) {
        return chirp(params, t, k) * refl_side(params, sign, k, side) *
               coherent_ft(params, state, k) * inv_sqrt2pi;
    });
    return run_phase_sum(g, wts, xs);
}

Complex F_pm_t(const ModelParams& params, const CoherentState& state, int sign, double t,
               double x, const QuadratureOptions& opts, QuadDiag* diag) {
    const double xs[1] = {x};
    return F_pm_t_many(params, state, sign, t, xs, opts, diag)[0];
}

// --- E1 ----------------------------------------------------------------------

std::vector<Complex> error_term_E1_many(const ModelParams& params, const CoherentState& state,
                                        double t, std::span<const double> xs,
                                        const QuadratureOptions& opts, QuadDiag* diag) {
    require_scattering_state(state, "error_term_E1");
    std::vector<Complex> out(xs.size(), Complex{0.0, 0.0});
    if (params.beta == 0.0) return out;
    const double bound = e1_skip_bound(params, state);
    if (bound < opts.skip_threshold) {
        if (diag) diag->tail_estimate += bound;
        return out;
    }
    const double kmax = std::abs(state.center.p) / params.hbar +
                        opts.tail_sigmas * momentum_scale(params, state);
    NodeSet g = halfline_window(params, state, t, max_abs(xs), kmax, +1, opts);

    std::vector<Complex> inner(g.k.size());
    for (std::size_t j = 0; j < inner.size(); ++j) inner[j] = e1_inner(params, state, g.k[j]);
    g.tail_estimate = 3.0 * std::abs(inner.back()) * kmax / (2.0 * kPi);
    note(diag, g);

    const auto w_even = make_weights(g, [&](std::size_t j, double k, int side) {
        const Complex r = refl_side(params, +1, k, side);
        return chirp(params, t, k) * (2.0 * std::norm(r)) * inner[j] / (2.0 * kPi);
    });
    const auto w_odd = make_weights(g, [&](std::size_t j, double k, int side) {
        return chirp(params, t, k) * refl_side(params, -1, k, side) * inner[j] / (2.0 * kPi);
    });

    std::vector<double> neg_abs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) neg_abs[i] = -std::abs(xs[i]);
    const auto sa = run_phase_sum(g, w_even, neg_abs);
    const auto sb_pos = run_phase_sum(g, w_odd, xs);
    const auto sb_neg = run_phase_sum(g, w_odd, negated(xs));
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = sign_of(xs[i]) * sa[i] - (sb_pos[i] - sb_neg[i]);
    return out;
}

Complex error_term_E1(const ModelParams& params, const CoherentState& state, double t, double x,
                      const QuadratureOptions& opts, QuadDiag* diag) {
    const double xs[1] = {x};
    return error_term_E1_many(params, state, t, xs, opts, diag)[0];
}

// --- E2 ----------------------------------------------------------------------

std::vector<Complex> error_term_E2_many(const ModelParams& params, const CoherentState& state,
                                        double t, std::span<const double> xs,
                                        const QuadratureOptions& opts, QuadDiag* diag) {
    require_scattering_state(state, "error_term_E2");
    std::vector<Complex> out(xs.size(), Complex{0.0, 0.0});
    if (params.beta == 0.0) return out;
    const double bound = 2.0 * std::sqrt(2.0 / kPi) * antipeak_mass(params, state);
    if (bound < opts.skip_threshold) {
        if (diag) diag->tail_estimate += bound;
        return out;
    }
    const double q = state.center.q, p = state.center.p;
    const double sp = sign_of(p), sqp = sign_of(q * p);
    const double w = opts.window_sigmas * momentum_scale(params, state);
    NodeSet g = halfline_window(params, state, t, max_abs(xs), w, +1, opts);
    note(diag, g);

    const auto wts = make_weights(g, [&](std::size_t, double k, int side) {
        const Complex r = refl_side(params, +1, k, side);
        return std::sqrt(2.0 / kPi) * chirp(params, t, k) * std::norm(r) *
               coherent_ft(params, state, -sp * k);
    });
    std::vector<double> alphas(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) alphas[i] = sqp * std::abs(xs[i]);
    const auto sums = run_phase_sum(g, wts, alphas);
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = sign_of(q * xs[i]) * sums[i];
    return out;
}

Complex error_term_E2(const ModelParams& params, const CoherentState& state, double t, double x,
                      const QuadratureOptions& opts, QuadDiag* diag) {
    const double xs[1] = {x};
    return error_term_E2_many(params, state, t, xs, opts, diag)[0];
}

Complex error_term_Ebeta(const ModelParams& params, const CoherentState& state, double t,
                         double x) {
    if (!(params.beta < 0.0) || std::isinf(params.beta)) return {0.0, 0.0};
    const double lam = bound_eigenvalue(params);
    return std::exp(-kI * (t * lam / params.hbar)) * bound_overlap(params, state) *
           bound_state_eval(params, x);
}

// --- E3 ----------------------------------------------------------------------

std::vector<Complex> error_term_E3_many(const ModelParams& params, int sign,
                                        const CoherentState& state, std::span<const double> xs,
                                        const QuadratureOptions& opts, QuadDiag* diag) {
    require_scattering_state(state, "error_term_E3");
    std::vector<Complex> out(xs.size(), Complex{0.0, 0.0});
    if (params.beta == 0.0) return out;
    const double bound = 4.0 / std::sqrt(2.0 * kPi) * antipeak_mass(params, state);
    if (bound < opts.skip_threshold) {
        if (diag) diag->tail_estimate += bound;
        return out;
    }
    const double q = state.center.q, p = state.center.p;
    const double sp = sign_of(p), sqp = sign_of(q * p);
    const double w = opts.window_sigmas * momentum_scale(params, state);
    NodeSet g = halfline_window(params, state, 0.0, max_abs(xs), w, +1, opts);
    note(diag, g);

    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * kPi);
    const auto wts = make_weights(g, [&](std::size_t, double k, int side) {
        return inv_sqrt2pi * refl_side(params, sign, k, side) *
               coherent_ft(params, state, -sp * k);
    });
    std::vector<double> a_plus(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) a_plus[i] = sqp * std::abs(xs[i]);
    const auto s1 = run_phase_sum(g, wts, a_plus);
    const auto s2 = run_phase_sum(g, wts, negated(a_plus));
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = static_cast<double>(sign) * sign_of(q * xs[i]) * (s1[i] - s2[i]);
    return out;
}

Complex error_term_E3(const ModelParams& params, int sign, const CoherentState& state, double x,
                      const QuadratureOptions& opts, QuadDiag* diag) {
    const double xs[1] = {x};
    return error_term_E3_many(params, sign, state, xs, opts, diag)[0];
}

// --- exact evolution -----------------------------------------------------------

std::vector<Complex> evolve_exact_at(const ModelParams& params, const CoherentState& state,
                                     double t, std::span<const double> xs,
                                     const QuadratureOptions& opts, QuadDiag* diag) {
    params.validate();
    state.validate();
    const CoherentState evolved = free_evolve_state(params, state, t);
    std::vector<Complex> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = coherent_eval(params, evolved, xs[i]);
    if (params.beta == 0.0) return out;
    require_scattering_state(state, "evolve_exact");

    const double q = state.center.q, p = state.center.p;
    const int fsign = q * p > 0.0 ? +1 : -1;
    const double sq = sign_of(q);
    std::vector<double> fold(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) fold[i] = -sq * std::abs(xs[i]);
    const auto fvals = F_pm_t_many(params, state, fsign, t, fold, opts, diag);
    const auto e1 = error_term_E1_many(params, state, t, xs, opts, diag);
    const auto e2 = error_term_E2_many(params, state, t, xs, opts, diag);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] += sign_of(xs[i]) * fvals[i] + e1[i] + e2[i] +
                  error_term_Ebeta(params, state, t, xs[i]);
    }
    return out;
}

WaveSample evolve_exact(const ModelParams& params, const CoherentState& state, double t,
                        const GridSpec& grid, const QuadratureOptions& opts, QuadDiag* diag) {
    return WaveSample{grid, evolve_exact_at(params, state, t, grid.nodes(), opts, diag)};
}

// --- spectral (validation) route -------------------------------------------------

WaveSample evolve_spectral(const ModelParams& params, const CoherentState& state, double t,
                           const GridSpec& grid, const QuadratureOptions& opts, QuadDiag* diag) {
    params.validate();
    state.validate();
    const double kmax = std::abs(state.center.p) / params.hbar +
                        opts.tail_sigmas * momentum_scale(params, state);
    const auto xs = grid.nodes();
    const double dk = dk_rule(params, state, t, grid.x_max, kmax, opts);
    NodeSet g;
    append_halfline(g, kmax, -1, dk, kink_scale(params), opts.nk_cap);
    append_halfline(g, kmax, +1, dk, kink_scale(params), opts.nk_cap);

    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * kPi);
    std::vector<Complex> gen(g.k.size());
    for (std::size_t j = 0; j < gen.size(); ++j) {
        const double k = g.k[j];
        Complex v = coherent_ft(params, state, k);
        if (params.beta != 0.0)
            v += std::conj(refl_side(params, +1, k, g.side[j])) * inv_sqrt2pi *
                 signed_abs_overlap(params, state, std::abs(k));
        gen[j] = v;
    }
    g.tail_estimate = (std::abs(gen.front()) + std::abs(gen.back())) * kmax / (2.0 * kPi);
    note(diag, g);

    const auto w_plane = make_weights(g, [&](std::size_t j, double k, int) {
        return chirp(params, t, k) * gen[j] * inv_sqrt2pi;
    });
    const auto plane = run_phase_sum(g, w_plane, xs);

    // scattered part of phi_k^+: R_+(k) sgn(x) e^{-i|k||x|}; alpha = -|x| on
    // k > 0 nodes, +|x| on k < 0 nodes.
    const auto w_scat = make_weights(g, [&](std::size_t j, double k, int side) {
        return chirp(params, t, k) * gen[j] * inv_sqrt2pi * refl_side(params, +1, k, side);
    });
    std::vector<double> k_pos, k_neg;
    std::vector<Complex> w_pos, w_neg;
    for (std::size_t j = 0; j < g.k.size(); ++j) {
        if (g.side[j] > 0) {
            k_pos.push_back(g.k[j]);
            w_pos.push_back(w_scat[j]);
        } else {
            k_neg.push_back(g.k[j]);
            w_neg.push_back(w_scat[j]);
        }
    }
    std::vector<double> pos_abs(grid.n), neg_abs(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        pos_abs[i] = std::abs(xs[i]);
        neg_abs[i] = -pos_abs[i];
    }
    std::vector<Complex> scat_pos(grid.n, Complex{0, 0}), scat_neg(grid.n, Complex{0, 0});
    if (!k_pos.empty()) phase_sum(k_pos, w_pos, neg_abs, scat_pos);
    if (!k_neg.empty()) phase_sum(k_neg, w_neg, pos_abs, scat_neg);

    WaveSample out{grid, std::vector<Complex>(grid.n)};
    for (int i = 0; i < grid.n; ++i) {
        out.values[i] = plane[i] + sign_of(xs[i]) * (scat_pos[i] + scat_neg[i]) +
                        error_term_Ebeta(params, state, t, xs[i]);
    }
    return out;
}

// --- wave operators ---------------------------------------------------------------

WaveSample wave_op_apply(const ModelParams& params, int sign, const CoherentState& state,
                         const GridSpec& grid, const QuadratureOptions& opts, QuadDiag* diag) {
    params.validate();
    state.validate();
    WaveSample out = sample_state(params, state, grid);
    if (params.beta == 0.0) return out;
    require_scattering_state(state, "wave_op_apply");

    NodeSet g = packet_window(params, state, 0.0, grid.x_max, opts);
    note(diag, g);
    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * kPi);
    const auto wts = make_weights(g, [&](std::size_t, double k, int side) {
        return inv_sqrt2pi * refl_side(params, sign, k, side) * coherent_ft(params, state, k);
    });
    std::vector<double> k_pos, k_neg;
    std::vector<Complex> w_pos, w_neg;
    for (std::size_t j = 0; j < g.k.size(); ++j) {
        if (g.side[j] > 0) {
            k_pos.push_back(g.k[j]);
            w_pos.push_back(wts[j]);
        } else {
            k_neg.push_back(g.k[j]);
            w_neg.push_back(wts[j]);
        }
    }
    const double s = static_cast<double>(sign);
    std::vector<double> a_pos(grid.n), a_neg(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double ax = std::abs(grid.node(i));
        a_pos[i] = -s * ax;  // e^{-i s k |x|} on k > 0
        a_neg[i] = s * ax;   // e^{+i s k |x|} on k < 0
    }
    std::vector<Complex> s_pos(grid.n, Complex{0, 0}), s_neg(grid.n, Complex{0, 0});
    if (!k_pos.empty()) phase_sum(k_pos, w_pos, a_pos, s_pos);
    if (!k_neg.empty()) phase_sum(k_neg, w_neg, a_neg, s_neg);
    for (int i = 0; i < grid.n; ++i)
        out.values[i] += sign_of(grid.node(i)) * (s_pos[i] + s_neg[i]);
    return out;
}

WaveSample wave_op_via_split(const ModelParams& params, int sign, const CoherentState& state,
                             const GridSpec& grid, const QuadratureOptions& opts,
                             QuadDiag* diag) {
    params.validate();
    state.validate();
    WaveSample out = sample_state(params, state, grid);
    if (params.beta == 0.0) return out;
    require_scattering_state(state, "wave_op_via_split");
    const double q = state.center.q, p = state.center.p;
    const double s = static_cast<double>(sign);
    const double sq = sign_of(q);
    // theta(qp): F_{pm,0}(-/+ sgn(q)|x|); theta(-qp): F_{pm,0}(+/- sgn(q)|x|)
    const double fold_sign = q * p > 0.0 ? -s * sq : s * sq;
    const auto xs = grid.nodes();
    std::vector<double> fold(grid.n);
    for (int i = 0; i < grid.n; ++i) fold[i] = fold_sign * std::abs(xs[i]);
    const auto fv = F_pm_t_many(params, state, sign, 0.0, fold, opts, diag);
    const auto e3 = error_term_E3_many(params, sign, state, xs, opts, diag);
    for (int i = 0; i < grid.n; ++i) out.values[i] += sign_of(xs[i]) * fv[i] + e3[i];
    return out;
}

WaveSample wave_op_apply_sample(const ModelParams& params, int sign, const WaveSample& g,
                                double k_max, const QuadratureOptions& opts, QuadDiag* diag) {
    params.validate();
    if (params.beta == 0.0) return g;
    const GridSpec& grid = g.grid;
    if (2.0 * k_max * grid.spacing() > 2.8)
        throw QuadratureError("wave_op_apply_sample: x-grid too coarse for k_max " +
                              std::to_string(k_max));
    const double dk = std::min(opts.phase_step / grid.x_max,
                               k_max / (4.0 * opts.mesh_factor));
    NodeSet kk;
    append_halfline(kk, k_max, -1, dk, kink_scale(params), opts.nk_cap);
    append_halfline(kk, k_max, +1, dk, kink_scale(params), opts.nk_cap);
    note(diag, kk);

    const auto xw = simpson_weights(grid.n, grid.spacing());
    const auto xnodes = grid.nodes();
    std::vector<Complex> plane_w(grid.n);
    for (int i = 0; i < grid.n; ++i) plane_w[i] = xw[i] * g.values[i];
    std::vector<double> neg_k(kk.k.size());
    for (std::size_t j = 0; j < kk.k.size(); ++j) neg_k[j] = -kk.k[j];
    std::vector<Complex> ghat(kk.k.size());
    phase_sum(xnodes, plane_w, neg_k, ghat);

    const double inv_2pi = 1.0 / (2.0 * kPi);
    std::vector<double> k_pos, k_neg;
    std::vector<Complex> w_pos, w_neg;
    for (std::size_t j = 0; j < kk.k.size(); ++j) {
        const Complex w =
            kk.w[j] * inv_2pi * refl_side(params, sign, kk.k[j], kk.side[j]) * ghat[j];
        if (kk.side[j] > 0) {
            k_pos.push_back(kk.k[j]);
            w_pos.push_back(w);
        } else {
            k_neg.push_back(kk.k[j]);
            w_neg.push_back(w);
        }
    }
    const double s = static_cast<double>(sign);
    std::vector<double> a_pos(grid.n), a_neg(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double ax = std::abs(xnodes[i]);
        a_pos[i] = -s * ax;
        a_neg[i] = s * ax;
    }
    std::vector<Complex> s_pos(grid.n, Complex{0, 0}), s_neg(grid.n, Complex{0, 0});
    if (!k_pos.empty()) phase_sum(k_pos, w_pos, a_pos, s_pos);
    if (!k_neg.empty()) phase_sum(k_neg, w_neg, a_neg, s_neg);
    WaveSample out = g;
    for (int i = 0; i < grid.n; ++i)
        out.values[i] += sign_of(xnodes[i]) * (s_pos[i] + s_neg[i]);
    return out;
}

// --- scattering --------------------------------------------------------------------

WaveSample scattering_apply(const ModelParams& params, const CoherentState& state,
                            const GridSpec& grid, const QuadratureOptions& opts, QuadDiag* diag) {
    params.validate();
    state.validate();
    if (params.beta == 0.0) return sample_state(params, state, grid);
    require_scattering_state(state, "scattering_apply");

    const WaveSample g = wave_op_apply(params, -1, state, grid, opts, diag);

    const double kscale = momentum_scale(params, state);
    const double K = std::abs(state.center.p) / params.hbar + opts.tail_sigmas * kscale;
    const double f_g = std::abs(state.center.p) / params.hbar + opts.window_sigmas * kscale;
    if ((K + f_g) * grid.spacing() > 2.8)
        throw QuadratureError(
            "scattering_apply: x-grid too coarse for the F_+ stage; need spacing <= " +
            std::to_string(2.8 / (K + f_g)));

    const double dk = dk_rule(params, state, 0.0, grid.x_max, K, opts);
    NodeSet kk;
    append_halfline(kk, K, -1, dk, kink_scale(params), opts.nk_cap);
    append_halfline(kk, K, +1, dk, kink_scale(params), opts.nk_cap);
    note(diag, kk);

    // F_+ stage by x-quadrature on the grid.
    const auto xw = simpson_weights(grid.n, grid.spacing());
    const auto xnodes = grid.nodes();
    const auto xabs = grid_abs(grid);
    std::vector<Complex> plane_w(grid.n), signed_w(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        plane_w[i] = xw[i] * g.values[i];
        signed_w[i] = xw[i] * sign_of(xnodes[i]) * g.values[i];
    }
    std::vector<double> neg_k(kk.k.size()), abs_k(kk.k.size());
    for (std::size_t j = 0; j < kk.k.size(); ++j) {
        neg_k[j] = -kk.k[j];
        abs_k[j] = std::abs(kk.k[j]);
    }
    std::vector<Complex> ft_plane(kk.k.size()), ft_signed(kk.k.size());
    phase_sum(xnodes, plane_w, neg_k, ft_plane);
    phase_sum(xabs, signed_w, abs_k, ft_signed);

    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * kPi);
    std::vector<Complex> back_w(kk.k.size());
    for (std::size_t j = 0; j < kk.k.size(); ++j) {
        const Complex gen =
            inv_sqrt2pi *
            (ft_plane[j] + std::conj(refl_side(params, +1, kk.k[j], kk.side[j])) * ft_signed[j]);
        back_w[j] = kk.w[j] * gen * inv_sqrt2pi;
    }

    WaveSample out{grid, std::vector<Complex>(grid.n)};
    phase_sum(kk.k, back_w, xnodes, out.values);
    return out;
}

double acpart_mass(const ModelParams& params, const CoherentState& state,
                   const QuadratureOptions& opts, QuadDiag* diag) {
    params.validate();
    state.validate();
    const double kmax = std::abs(state.center.p) / params.hbar +
                        opts.tail_sigmas * momentum_scale(params, state);
    const double dk = dk_rule(params, state, 0.0, 0.0, kmax, opts);
    NodeSet g;
    append_halfline(g, kmax, -1, dk, kink_scale(params), opts.nk_cap);
    append_halfline(g, kmax, +1, dk, kink_scale(params), opts.nk_cap);
    note(diag, g);
    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * kPi);
    double acc = 0.0;
    for (std::size_t j = 0; j < g.k.size(); ++j) {
        const double k = g.k[j];
        Complex v = coherent_ft(params, state, k);
        if (params.beta != 0.0)
            v += std::conj(refl_side(params, +1, k, g.side[j])) * inv_sqrt2pi *
                 signed_abs_overlap(params, state, std::abs(k));
        acc += g.w[j] * std::norm(v);
    }
    return acc;
}

}  // namespace dprime
