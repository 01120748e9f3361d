#include "dprime/checks.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dprime/classical.hpp"
#include "dprime/specfun.hpp"

namespace dprime {

namespace {

constexpr double kPi = std::numbers::pi;

struct Suite {
    std::vector<CheckResult> results;
    std::mt19937 rng{12345};

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    void report(const std::string& name, double worst, double tol) {
        std::ostringstream os;
        os << "max deviation " << worst << " (tol " << tol << ")";
        results.push_back({name, worst <= tol, os.str()});
    }
};

void check_core(Suite& s, const ModelParams& params, PhasePoint xi) {
    const CoherentState psi0 = CoherentState::initial(params, xi);
    double worst = 0.0;
    for (double t = -10.0; t <= 10.0; t += 2.5) {
        const CoherentState st = free_evolve_state(params, psi0, t);
        worst = std::max(worst,
                         std::abs((std::conj(st.sigma) * st.sigma_breve).real() - 1.0));
    }
    s.report("core.sigma-constraint", worst, 1e-14);

    worst = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double t = s.uniform(-5.0, 5.0), u = s.uniform(-5.0, 5.0);
        const CoherentState a = free_evolve_state(params, free_evolve_state(params, psi0, u), t);
        const CoherentState b = free_evolve_state(params, psi0, t + u);
        worst = std::max({worst, std::abs(a.sigma - b.sigma), std::abs(a.center.q - b.center.q),
                          std::abs(a.center.p - b.center.p), std::abs(a.phase - b.phase)});
    }
    s.report("core.group-law", worst, 1e-12);

    worst = 0.0;
    for (double t = -10.0; t <= 10.0; t += 4.0) {
        const CoherentState st = free_evolve_state(params, psi0, t);
        const GridSpec grid = default_grid(params, psi0, t);
        worst = std::max(worst, std::abs(l2_norm(sample_state(params, st, grid)) - 1.0));
    }
    s.report("core.normalization", worst, 1e-8);

    const GridSpec grid = default_grid(params, psi0, 0.0);
    const WaveSample direct = sample_state(params, CoherentState::initial(params, -xi), grid);
    const WaveSample mirrored = reflect(sample_state(params, psi0, grid));
    worst = 0.0;
    for (int i = 0; i < grid.n; ++i)
        worst = std::max(worst, std::abs(direct.values[i] - mirrored.values[i]));
    s.report("core.reflection", worst, 0.0);
}

void check_specfun(Suite& s) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Complex z{s.uniform(-20.0, 20.0), s.uniform(-3.0, 20.0)};
        const Complex lhs = faddeeva(Complex{-z.real(), z.imag()});
        const Complex rhs = std::conj(faddeeva(z));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs)));
    }
    s.report("specfun.schwarz-reflection", worst, 1e-13);

    worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Complex a{s.uniform(0.2, 4.0), s.uniform(-2.0, 2.0)};
        const Complex c{s.uniform(-4.0, 4.0), s.uniform(-4.0, 4.0)};
        const Complex lhs = gaussian_halfline(a, c) + gaussian_halfline(a, -c);
        const Complex rhs = std::sqrt(kPi / a) * std::exp(c * c / (4.0 * a));
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    s.report("specfun.halfline-split", worst, 1e-12);
}

void check_reflection(Suite& s) {
    double worst_id = 0.0, worst_conj = 0.0, worst_mag = 0.0;
    for (int i = 0; i < 10000; ++i) {
        ModelParams params;
        params.hbar = s.uniform(0.05, 2.0);
        params.mass = s.uniform(0.3, 3.0);
        params.beta = s.uniform(-3.0, 3.0);
        if (params.beta == 0.0) params.beta = 1.0;
        const double k = s.uniform(-30.0, 30.0);
        if (k == 0.0) continue;
        const Complex rp = reflection_coeff(params, +1, k);
        const Complex rm = reflection_coeff(params, -1, k);
        worst_id = std::max(worst_id,
                            std::abs(rp - rm - 2.0 * sign_of(k) * std::norm(rp)));
        worst_conj = std::max(worst_conj, std::abs(std::conj(rp) + rm));
        worst_mag = std::max({worst_mag, std::abs(rp) - 1.0, std::abs(rm) - 1.0});
    }
    s.report("reflection.difference-identity", worst_id, 1e-14);
    s.report("reflection.conjugation", worst_conj, 1e-14);
    s.report("reflection.bounded", worst_mag, 1e-15);
}

PhaseFunction random_phase_function(Suite& s) {
    const double a = s.uniform(0.2, 1.5), b = s.uniform(0.2, 1.5);
    const double q0 = s.uniform(-2.0, 2.0), p0 = s.uniform(-2.0, 2.0);
    const double u = s.uniform(-1.0, 1.0), v = s.uniform(-1.0, 1.0);
    return [=](PhasePoint xi) {
        const Complex arg{-a * (xi.q - q0) * (xi.q - q0) - b * (xi.p - p0) * (xi.p - p0),
                          u * xi.q + v * xi.p};
        return std::exp(arg);
    };
}

void check_classical(Suite& s, const ModelParams& params) {
    const ClassicalCoupling coupling = params.beta != 0.0
                                           ? ClassicalCoupling::from_params(params)
                                           : ClassicalCoupling::finite(-2.0);
    const double mass = params.mass;

    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const PhaseFunction f = random_phase_function(s);
        PhasePoint xi{s.uniform(-3.0, 3.0), s.uniform(-3.0, 3.0)};
        if (std::abs(xi.q * xi.p) < 1e-6) continue;
        for (int sign : {+1, -1}) {
            const PhaseFunction wf = [&, sign](PhasePoint z) {
                return classical_wave(coupling, mass, sign, f, z);
            };
            const PhaseFunction rwf = [&, sign](PhasePoint z) {
                return classical_wave_reverse(coupling, mass, sign, f, z);
            };
            worst = std::max(worst,
                             std::abs(classical_wave_reverse(coupling, mass, sign, wf, xi) -
                                      f(xi)));
            worst = std::max(worst,
                             std::abs(classical_wave(coupling, mass, sign, rwf, xi) - f(xi)));
        }
    }
    s.report("classical.wave-unitarity", worst, 1e-12);

    worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const PhaseFunction f = random_phase_function(s);
        PhasePoint xi{s.uniform(-3.0, 3.0), s.uniform(-3.0, 3.0)};
        if (std::abs(xi.q * xi.p) < 1e-6) continue;
        const PhaseFunction wp = [&](PhasePoint z) {
            return classical_wave(coupling, mass, +1, f, z);
        };
        const Complex lhs = classical_scatter(coupling, mass, wp, xi);
        const Complex rhs = classical_wave(coupling, mass, -1, f, xi);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    s.report("classical.scatter-intertwine", worst, 1e-12);

    worst = 0.0;
    int done = 0;
    while (done < 1000) {
        const PhaseFunction f = random_phase_function(s);
        const PhasePoint xi{s.uniform(-3.0, 3.0), s.uniform(-3.0, 3.0)};
        const double t = s.uniform(-3.0, 3.0), u = s.uniform(-3.0, 3.0);
        const auto near_gate = [&](PhasePoint z, double tau) {
            return std::abs(z.q * z.p) < 1e-3 ||
                   std::abs(std::abs(z.p * tau) / mass - std::abs(z.q)) < 1e-3;
        };
        const PhasePoint mid{xi.q - xi.p * t / mass, xi.p};
        if (near_gate(xi, t) || near_gate(xi, t + u) || near_gate(mid, u) ||
            near_gate(PhasePoint{-mid.q, -mid.p}, u))
            continue;
        const PhaseFunction inner = [&](PhasePoint z) {
            return flow_apply(coupling, mass, f, u, z);
        };
        const Complex lhs = flow_apply(coupling, mass, inner, t, xi);
        const Complex rhs = flow_apply(coupling, mass, f, t + u, xi);
        worst = std::max(worst, std::abs(lhs - rhs));
        ++done;
    }
    s.report("classical.flow-group-law", worst, 1e-12);

    worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double q = s.uniform(-3.0, 3.0), p = s.uniform(-3.0, 3.0);
        const double t = s.uniform(-3.0, 3.0);
        if (std::abs(q * p) < 1e-6 || p == 0.0) continue;
        if (std::abs(std::abs(p * t) / mass - std::abs(q)) < 1e-6) continue;
        const double lhs = heaviside(-t * q * p) * heaviside(std::abs(p * t) / mass - std::abs(q));
        const double rhs = heaviside(-q * p) * heaviside(t + mass * q / p) +
                           heaviside(q * p) * heaviside(-t - mass * q / p);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    s.report("classical.gate-split", worst, 0.0);
}

void check_quantum(Suite& s, const ModelParams& params, PhasePoint xi,
                   const QuadratureOptions& opts) {
    const CoherentState psi = CoherentState::initial(params, xi);
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
        worst = std::max(worst, std::abs(quantum_state_norm(params, psi, t, opts) - 1.0));
    }
    s.report("quantum.unitarity", worst, 1e-6);

    double proj = 0.0;
    if (params.beta < 0.0 && std::isfinite(params.beta))
        proj = std::norm(bound_overlap(params, psi));
    s.report("quantum.completeness",
             std::abs(acpart_mass(params, psi, opts) + proj - 1.0), 1e-6);

    const PhasePoint xi2{xi.q + 0.4, xi.p - 0.3};
    if (xi2.q * xi2.p != 0.0) {
        const CoherentState psi2 = CoherentState::initial(params, xi2);
        const double t = 1.0;
        const Complex before = quantum_inner_product(params, psi, psi2, 0.0, opts);
        const Complex after = quantum_inner_product(params, psi, psi2, t, opts);
        s.report("quantum.inner-product", std::abs(after - before), 1e-5);
    }
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const ModelParams& params, PhasePoint xi,
                                             const QuadratureOptions& opts) {
    params.validate();
    Suite s;
    check_core(s, params, xi);
    check_specfun(s);
    check_reflection(s);
    check_classical(s, params);
    if (params.beta != 0.0 && xi.q * xi.p != 0.0) check_quantum(s, params, xi, opts);
    return s.results;
}

}  // namespace dprime
