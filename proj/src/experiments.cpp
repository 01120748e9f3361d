#include "dprime/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "dprime/classical.hpp"

namespace dprime {

namespace {

void require_sweep_point(const ModelParams& params, PhasePoint xi, const char* who) {
    if (xi.q * xi.p == 0.0) throw std::domain_error(std::string(who) + ": requires q p != 0");
    if (params.beta == 0.0) throw std::domain_error(std::string(who) + ": requires beta != 0");
}

double next_pow2(double x) {
    double p = 1.0;
    while (p < x) p *= 2.0;
    return p;
}

}  // namespace

const char* to_string(SweepKind kind) {
    switch (kind) {
        case SweepKind::Dynamics: return "dynamics";
        case SweepKind::WaveOpPlus: return "waveop+";
        case SweepKind::WaveOpMinus: return "waveop-";
        case SweepKind::Scatter: return "scatter";
    }
    return "?";
}

std::optional<SweepKind> sweep_kind_from(const std::string& name) {
    if (name == "dynamics") return SweepKind::Dynamics;
    if (name == "waveop+") return SweepKind::WaveOpPlus;
    if (name == "waveop-") return SweepKind::WaveOpMinus;
    if (name == "scatter") return SweepKind::Scatter;
    return std::nullopt;
}

void RegimeParams::validate() const {
    if (!(lambda > 0.0 && lambda < 0.5))
        throw std::invalid_argument("RegimeParams: lambda must lie in (0, 1/2)");
    if (!(c0 > std::sqrt(5.0)))
        throw std::invalid_argument("RegimeParams: c0 must exceed sqrt(5)");
    if (!eta_rule.scaling && !(eta_rule.fixed_eta > 0.0 && eta_rule.fixed_eta < 1.0))
        throw std::invalid_argument("RegimeParams: fixed eta must lie in (0, 1)");
}

double underline_h(const ModelParams& params, PhasePoint xi) {
    require_sweep_point(params, xi, "underline_h");
    const double s2 = params.sigma0 * params.sigma0;
    const double b1 = params.hbar * s2 / (xi.q * xi.q);
    const double b2 = params.hbar / (s2 * xi.p * xi.p);
    const double b3 = params.hbar / std::cbrt(params.mass * std::abs(params.beta * xi.p));
    return std::max({b1, b2, b3});
}

double collision_time(PhasePoint xi, double mass) {
    if (xi.p == 0.0) throw std::domain_error("collision_time: requires p != 0");
    return -mass * xi.q / xi.p;
}

bool admissible_time(double t, PhasePoint xi, const RegimeParams& regime, double mass,
                     double uh) {
    const double tc = collision_time(xi, mass);
    const double window = regime.c0 * std::abs(tc) *
                          std::sqrt((3.5 - regime.lambda) * uh * std::abs(std::log(uh)));
    return std::abs(t - tc) >= window;
}

std::array<double, 6> dynamics_bound_terms(const ModelParams& params, PhasePoint xi, double t,
                                           double eta) {
    require_sweep_point(params, xi, "dynamics_bound");
    if (!(eta > 0.0 && eta < 1.0))
        throw std::domain_error("dynamics_bound: eta must lie in (0, 1)");
    const double h = params.hbar, m = params.mass, s0 = params.sigma0;
    const double q = xi.q, p = xi.p;
    const double s02 = s0 * s0;
    std::array<double, 6> terms{};
    terms[0] = eta / (1.0 - eta) * (h * h * h / (m * std::abs(params.beta * p)));
    terms[1] = std::exp(-eta * eta * s02 * p * p / (2.0 * h));
    terms[2] = std::exp(-q * q / (4.0 * h * s02));
    terms[3] = std::exp(-s02 * p * p / h);
    const double proj = std::pow(h, 5) * s02 / (m * m * params.beta * params.beta);
    terms[4] = std::isinf(params.beta)
                   ? 0.0
                   : std::pow(proj, 0.25) * std::exp(proj) * (terms[3] + terms[2]);
    const double qt = q + p * t / m;
    const double st2 = s02 + t * t / (4.0 * m * m * s02);
    terms[5] = std::exp(-qt * qt / (4.0 * h * st2));
    return terms;
}

double dynamics_bound(const ModelParams& params, PhasePoint xi, double t, double eta) {
    const auto terms = dynamics_bound_terms(params, xi, t, eta);
    double acc = 0.0;
    for (double v : terms) acc += v;
    return acc;
}

double waveop_bound(const ModelParams& params, PhasePoint xi, double eta,
                      bool with_projection) {
    const auto terms = dynamics_bound_terms(params, xi, 0.0, eta);
    double acc = terms[0] + terms[1] + terms[2] + terms[3];
    if (with_projection) acc += terms[4];
    return acc;
}

namespace {

// Half-line target set avoiding x = 0; first the left half (ascending), then
// the right half, each with odd node count for plain Simpson.
struct SplitTargets {
    std::vector<double> xs;
    int n_half;
    double spacing;
};

SplitTargets split_targets(double x_max, int n_half) {
    if (n_half % 2 == 0) ++n_half;
    const double eps = 1e-12 * x_max;
    SplitTargets t;
    t.n_half = n_half;
    t.spacing = (x_max - eps) / (n_half - 1);
    t.xs.resize(2 * n_half);
    for (int j = 0; j < n_half; ++j) {
        const double x = eps + j * t.spacing;
        t.xs[n_half - 1 - j] = -x;
        t.xs[n_half + j] = x;
    }
    return t;
}

}  // namespace

double quantum_state_norm(const ModelParams& params, const CoherentState& state, double t,
                          const QuadratureOptions& opts) {
    const GridSpec base = default_grid(params, state, t);
    const SplitTargets tg = split_targets(base.x_max, 8193);
    const auto vals = evolve_exact_at(params, state, t, tg.xs, opts);
    const auto w = simpson_weights(tg.n_half, tg.spacing);
    double acc = 0.0;
    for (int j = 0; j < tg.n_half; ++j) {
        acc += w[j] * std::norm(vals[j]);
        acc += w[j] * std::norm(vals[tg.n_half + j]);
    }
    return std::sqrt(acc);
}

Complex quantum_inner_product(const ModelParams& params, const CoherentState& a,
                              const CoherentState& b, double t, const QuadratureOptions& opts) {
    const GridSpec ga = default_grid(params, a, t);
    const GridSpec gb = default_grid(params, b, t);
    const SplitTargets tg = split_targets(std::max(ga.x_max, gb.x_max), 8193);
    const auto va = evolve_exact_at(params, a, t, tg.xs, opts);
    const auto vb = evolve_exact_at(params, b, t, tg.xs, opts);
    const auto w = simpson_weights(tg.n_half, tg.spacing);
    Complex acc{0.0, 0.0};
    for (int j = 0; j < tg.n_half; ++j) {
        acc += w[j] * std::conj(va[j]) * vb[j];
        acc += w[j] * std::conj(va[tg.n_half + j]) * vb[tg.n_half + j];
    }
    return acc;
}

double dynamics_error(const ModelParams& params, PhasePoint xi, double t, const GridSpec& grid,
                      const QuadratureOptions& opts) {
    const CoherentState state = CoherentState::initial(params, xi);
    const WaveSample exact = evolve_exact(params, state, t, grid, opts);
    const WaveSample semi = semiclassical_dynamics(params, state, t, grid);
    return l2_distance(exact, semi);
}

double waveop_error(const ModelParams& params, int sign, PhasePoint xi, const GridSpec& grid,
                    const QuadratureOptions& opts) {
    const CoherentState state = CoherentState::initial(params, xi);
    const WaveSample exact = wave_op_apply(params, sign, state, grid, opts);
    const WaveSample semi = semiclassical_waveop(params, sign, state, grid);
    return l2_distance(exact, semi);
}

double scatter_error(const ModelParams& params, PhasePoint xi, const GridSpec& grid,
                     const QuadratureOptions& opts) {
    const CoherentState state = CoherentState::initial(params, xi);
    const WaveSample exact = scattering_apply(params, state, grid, opts);
    const WaveSample semi = semiclassical_scatter(params, state, grid);
    return l2_distance(exact, semi);
}

GridSpec experiment_grid(const ModelParams& params, PhasePoint xi, double t, SweepKind kind,
                         const QuadratureOptions& opts) {
    const CoherentState state = CoherentState::initial(params, xi);
    const GridSpec base = default_grid(params, state, t);
    const double kscale = 1.0 / (params.sigma0 * std::sqrt(params.hbar));
    const double f_packet = std::abs(xi.p) / params.hbar + opts.window_sigmas * kscale;
    double budget;
    if (kind == SweepKind::Scatter) {
        const double K = std::abs(xi.p) / params.hbar + opts.tail_sigmas * kscale;
        budget = 2.0 / (K + f_packet);
    } else {
        budget = 1.2 / f_packet;
    }
    const double needed = 2.0 * base.x_max / budget + 1.0;
    const int n = static_cast<int>(std::max(4096.0, next_pow2(needed)));
    return GridSpec::symmetric(base.x_max, n);
}

std::vector<double> default_hbar_grid() {
    std::vector<double> out(9);
    double h = 0.1;
    for (auto& v : out) {
        v = h;
        h *= 0.67;
    }
    return out;
}

std::vector<double> default_times(const ModelParams& params, PhasePoint xi,
                                  const RegimeParams& regime) {
    const double tc = collision_time(xi, params.mass);
    const double uh = underline_h(params, xi);
    std::vector<double> out;
    for (double f : {0.5, 2.0, 4.0}) {
        const double t = f * tc;
        if (admissible_time(t, xi, regime, params.mass, uh)) out.push_back(t);
    }
    return out;
}

std::vector<SweepRecord> run_sweep(const ModelParams& base, PhasePoint xi,
                                   const RegimeParams& regime, std::span<const double> hbar_grid,
                                   std::span<const double> times, SweepKind kind,
                                   const QuadratureOptions& opts) {
    regime.validate();
    if (hbar_grid.size() < 5)
        throw std::invalid_argument("run_sweep: need a geometric hbar grid with >= 5 points");

    struct Task {
        double hbar;
        double t;
    };
    std::vector<Task> tasks;
    for (double h : hbar_grid) {
        ModelParams params = base;
        params.hbar = h;
        const double uh = underline_h(params, xi);
        if (kind == SweepKind::Dynamics) {
            if (times.empty()) {
                for (double t : default_times(params, xi, regime)) tasks.push_back({h, t});
            } else {
                for (double t : times) {
                    if (!admissible_time(t, xi, regime, params.mass, uh)) {
                        const double tc = collision_time(xi, params.mass);
                        const double window =
                            regime.c0 * std::abs(tc) *
                            std::sqrt((3.5 - regime.lambda) * uh * std::abs(std::log(uh)));
                        throw AdmissibilityError(
                            "run_sweep: t = " + std::to_string(t) + " violates |t - t_coll| >= " +
                            std::to_string(window) + " (t_coll = " + std::to_string(tc) +
                            ", underline_h = " + std::to_string(uh) + ")");
                    }
                    tasks.push_back({h, t});
                }
            }
        } else {
            tasks.push_back({h, 0.0});
        }
    }

    std::vector<SweepRecord> records(tasks.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        ModelParams params = base;
        params.hbar = tasks[i].hbar;
        const double t0 = omp_get_wtime();
        const double uh = underline_h(params, xi);
        const double eta = regime.eta_rule.eta(uh, regime.lambda);
        const GridSpec grid = experiment_grid(params, xi, tasks[i].t, kind, opts);
        SweepRecord rec;
        rec.hbar = tasks[i].hbar;
        rec.underline_h = uh;
        rec.t = tasks[i].t;
        rec.kind = kind;
        switch (kind) {
            case SweepKind::Dynamics:
                rec.error_l2 = dynamics_error(params, xi, tasks[i].t, grid, opts);
                rec.bound_rhs = dynamics_bound(params, xi, tasks[i].t, eta);
                break;
            case SweepKind::WaveOpPlus:
                rec.error_l2 = waveop_error(params, +1, xi, grid, opts);
                rec.bound_rhs = waveop_bound(params, xi, eta, false);
                break;
            case SweepKind::WaveOpMinus:
                rec.error_l2 = waveop_error(params, -1, xi, grid, opts);
                rec.bound_rhs = waveop_bound(params, xi, eta, false);
                break;
            case SweepKind::Scatter:
                rec.error_l2 = scatter_error(params, xi, grid, opts);
                rec.bound_rhs = waveop_bound(params, xi, eta, true);
                break;
        }
        rec.wall_time = omp_get_wtime() - t0;
        records[i] = rec;
    }
    return records;
}

SlopeFit fit_slope(std::span<const SweepRecord> records) {
    if (records.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 records");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(records.size());
    for (const auto& r : records) {
        if (!(r.error_l2 > 0.0) || !(r.underline_h > 0.0))
            throw std::invalid_argument("fit_slope: records must have positive error and h");
        const double x = std::log(r.underline_h);
        const double y = std::log(r.error_l2);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    SlopeFit fit;
    const double den = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_res = syy - sy * sy / n - fit.slope * (sxy - sx * sy / n);
    const double ss_tot = syy - sy * sy / n;
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace dprime
