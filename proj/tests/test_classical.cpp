#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dprime/classical.hpp"
#include "dprime/spectral.hpp"

using namespace dprime;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PhaseFunction gaussian_bump(double q0, double p0, double sg) {
    return [=](PhasePoint xi) {
        const double dq = xi.q - q0, dp = xi.p - p0;
        return Complex{std::exp(-(dq * dq + dp * dp) / (2.0 * sg * sg)) /
                           (sg * std::sqrt(std::numbers::pi)),
                       0.0};
    };
}

}  // namespace

TEST_CASE("singular flow basics") {
    const PhaseFunction f = [](PhasePoint xi) {
        return Complex{std::cos(xi.q) * std::exp(-0.1 * xi.p * xi.p), std::sin(0.3 * xi.q * xi.p)};
    };
    SUBCASE("t = 0 is the identity") {
        const PhasePoint xi{1.2, -0.7};
        CHECK(std::abs(flow_apply(ClassicalCoupling::finite(-2.0), 1.0, f, 0.0, xi) - f(xi)) ==
              0.0);
    }
    SUBCASE("b = 0 is the free translation") {
        const PhasePoint xi{1.2, -0.7};
        const Complex v = flow_apply(ClassicalCoupling::finite(0.0), 1.0, f, 2.0, xi);
        CHECK(std::abs(v - f(PhasePoint{1.2 + 0.7 * 2.0, -0.7})) == 0.0);
    }
    SUBCASE("full reflection swaps the branch") {
        // b = inf, m = 1, xi = (1, 1), t = 2: gate open, prefactor 1 -> f(1, -1)
        const Complex v =
            flow_apply(ClassicalCoupling::full_reflection(), 1.0, f, 2.0, PhasePoint{1.0, 1.0});
        CHECK(std::abs(v - f(PhasePoint{1.0, -1.0})) == 0.0);
    }
    SUBCASE("full-reflection two-branch form holds exactly") {
        const ClassicalCoupling wall = ClassicalCoupling::full_reflection();
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> ur(-3.0, 3.0);
        for (int i = 0; i < 500; ++i) {
            const PhasePoint xi{ur(rng), ur(rng)};
            const double t = ur(rng);
            const double gate =
                heaviside(t * xi.q * xi.p) * heaviside(std::abs(xi.p * t) - std::abs(xi.q));
            const Complex lhs = flow_apply(wall, 1.0, f, t, xi);
            const Complex rhs = (1.0 - gate) * f(PhasePoint{xi.q - xi.p * t, xi.p}) +
                                gate * f(PhasePoint{-xi.q + xi.p * t, -xi.p});
            CHECK(std::abs(lhs - rhs) < 1e-15);
        }
    }
    SUBCASE("group law off the gate boundaries") {
        const ClassicalCoupling coupling = ClassicalCoupling::finite(-1.7);
        std::mt19937 rng(4);
        std::uniform_real_distribution<double> ur(-3.0, 3.0);
        int done = 0;
        while (done < 1000) {
            const PhasePoint xi{ur(rng), ur(rng)};
            const double t = ur(rng), u = ur(rng);
            const auto near_gate = [&](PhasePoint z, double tau) {
                return std::abs(z.q * z.p) < 1e-3 ||
                       std::abs(std::abs(z.p * tau) - std::abs(z.q)) < 1e-3;
            };
            const PhasePoint mid{xi.q - xi.p * t, xi.p};
            if (near_gate(xi, t) || near_gate(xi, t + u) || near_gate(mid, u) ||
                near_gate(-mid, u))
                continue;
            const PhaseFunction inner = [&](PhasePoint z) {
                return flow_apply(coupling, 1.0, f, u, z);
            };
            const Complex lhs = flow_apply(coupling, 1.0, inner, t, xi);
            const Complex rhs = flow_apply(coupling, 1.0, f, t + u, xi);
            CHECK(std::abs(lhs - rhs) < 1e-13);
            ++done;
        }
    }
    SUBCASE("L2 unitarity on a sampled Gaussian") {
        // support placed deep inside the reflection gate so the discontinuity
        // lines carry no mass
        const PhaseFunction g = gaussian_bump(-2.5, 2.5, 0.15);
        const double t = 2.0;
        for (const ClassicalCoupling coupling :
             {ClassicalCoupling::finite(-2.0), ClassicalCoupling::full_reflection()}) {
            const double L = 6.5;
            const int n = 769;
            const double h = 2.0 * L / (n - 1);
            const auto w = simpson_weights(n, h);
            double mass = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const PhasePoint xi{-L + i * h, -L + j * h};
                    mass += w[i] * w[j] * std::norm(flow_apply(coupling, 1.0, g, t, xi));
                }
            }
            CHECK(std::sqrt(mass) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    SUBCASE("theta-gate factorization") {
        std::mt19937 rng(6);
        std::uniform_real_distribution<double> ur(-3.0, 3.0);
        int done = 0;
        while (done < 2000) {
            const double q = ur(rng), p = ur(rng), t = ur(rng);
            if (p == 0.0 || std::abs(q * p) < 1e-6 ||
                std::abs(std::abs(p * t) - std::abs(q)) < 1e-6)
                continue;
            const double lhs = heaviside(-t * q * p) * heaviside(std::abs(p * t) - std::abs(q));
            const double rhs = heaviside(-q * p) * heaviside(t + q / p) +
                               heaviside(q * p) * heaviside(-t - q / p);
            CHECK(lhs == rhs);
            ++done;
        }
    }
}

TEST_CASE("classical wave and scattering operators") {
    const PhaseFunction f = [](PhasePoint xi) {
        return Complex{std::exp(-0.2 * (xi.q - 1.0) * (xi.q - 1.0) - 0.1 * xi.p * xi.p),
                       std::sin(xi.q + 0.5 * xi.p)};
    };
    const double mass = 1.3;

    SUBCASE("even functions are fixed points") {
        const PhaseFunction even = [](PhasePoint xi) {
            return Complex{xi.q * xi.q + std::cos(xi.p), 0.0};
        };
        const ClassicalCoupling coupling = ClassicalCoupling::finite(0.9);
        const PhasePoint xi{1.0, -2.0};
        CHECK(std::abs(classical_wave(coupling, mass, +1, even, xi) - even(xi)) < 1e-15);
        CHECK(std::abs(classical_wave_reverse(coupling, mass, -1, even, xi) - even(xi)) < 1e-15);
    }
    SUBCASE("full reflection with an open gate maps to the mirror point") {
        const PhasePoint xi{1.5, -2.0};  // q p < 0, gate of W^+ open
        const Complex v = classical_wave(ClassicalCoupling::full_reflection(), mass, +1, f, xi);
        CHECK(std::abs(v - f(-xi)) < 1e-15);
    }
    SUBCASE("free coupling leaves everything alone") {
        const ClassicalCoupling free_coupling = ClassicalCoupling::finite(0.0);
        const PhasePoint xi{1.5, -2.0};
        CHECK(std::abs(classical_wave_reverse(free_coupling, mass, +1, f, xi) - f(xi)) == 0.0);
        CHECK(std::abs(classical_scatter(free_coupling, mass, f, xi) - f(xi)) == 0.0);
    }
    SUBCASE("reverse operators invert the wave operators pointwise") {
        const ClassicalCoupling coupling = ClassicalCoupling::finite(1.4);
        std::mt19937 rng(8);
        std::uniform_real_distribution<double> ur(-3.0, 3.0);
        for (int i = 0; i < 300; ++i) {
            const PhasePoint xi{ur(rng), ur(rng)};
            if (std::abs(xi.q * xi.p) < 1e-6) continue;
            for (int sign : {+1, -1}) {
                const PhaseFunction wf = [&, sign](PhasePoint z) {
                    return classical_wave(coupling, mass, sign, f, z);
                };
                CHECK(std::abs(classical_wave_reverse(coupling, mass, sign, wf, xi) - f(xi)) <
                      1e-14);
            }
        }
    }
    SUBCASE("scattering composes the wave operators") {
        const ClassicalCoupling coupling = ClassicalCoupling::finite(-0.8);
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> ur(-3.0, 3.0);
        for (int i = 0; i < 300; ++i) {
            const PhasePoint xi{ur(rng), ur(rng)};
            if (std::abs(xi.q * xi.p) < 1e-6) continue;
            const PhaseFunction wp = [&](PhasePoint z) {
                return classical_wave(coupling, mass, +1, f, z);
            };
            CHECK(std::abs(classical_scatter(coupling, mass, wp, xi) -
                           classical_wave(coupling, mass, -1, f, xi)) < 1e-14);
        }
    }
    SUBCASE("full-reflection scattering is the mirror map") {
        const PhasePoint xi{0.8, 1.1};
        CHECK(std::abs(classical_scatter(ClassicalCoupling::full_reflection(), mass, f, xi) -
                       f(-xi)) < 1e-15);
    }
}

TEST_CASE("semiclassical dynamics closed form") {
    SUBCASE("t = 0 reproduces the initial state exactly") {
        ModelParams params{0.3, 1.0, 1.2, 1.0};
        const CoherentState s = CoherentState::initial(params, {-2.0, 1.5});
        const GridSpec grid = default_grid(params, s, 0.0);
        const WaveSample a = semiclassical_dynamics(params, s, 0.0, grid);
        const WaveSample b = sample_state(params, s, grid);
        for (int i = 0; i < grid.n; ++i) CHECK(std::abs(a.values[i] - b.values[i]) == 0.0);
    }
    SUBCASE("beta = 0 reduces to free evolution exactly") {
        ModelParams params{0.3, 1.0, 0.0, 1.0};
        const CoherentState s = CoherentState::initial(params, {-2.0, 1.5});
        const GridSpec grid = default_grid(params, s, 1.7);
        const WaveSample a = semiclassical_dynamics(params, s, 1.7, grid);
        const WaveSample b = sample_state(params, free_evolve_state(params, s, 1.7), grid);
        CHECK(l2_distance(a, b) == 0.0);
    }
    SUBCASE("matches the flow composition route pointwise") {
        // two independent code paths for e^{iA_t/hbar} (e^{itL_B} phi_{sigma_t,x})(xi)
        for (double beta : {0.8, -1.1, kInf}) {
            ModelParams params{0.3, 1.0, beta, 1.0};
            for (const PhasePoint xi : {PhasePoint{-2.0, 1.5}, PhasePoint{2.0, 1.5}}) {
                for (double t : {0.4, 2.4, 6.0, -3.0}) {
                    const CoherentState s = CoherentState::initial(params, xi);
                    const GridSpec grid = default_grid(params, s, t, 64);
                    const WaveSample semi = semiclassical_dynamics(params, s, t, grid);
                    const CoherentState st = free_evolve_state(params, s, t);
                    const ClassicalCoupling coupling = ClassicalCoupling::from_params(params);
                    const Complex action_phase = std::exp(
                        Complex{0.0, xi.p * xi.p * t / (2.0 * params.mass * params.hbar)});
                    for (int i = 0; i < grid.n; i += 7) {
                        const double x = grid.node(i);
                        const PhaseFunction phi = [&](PhasePoint z) {
                            return phi_phase_space_eval(params, st.sigma, x, z);
                        };
                        const Complex lhs =
                            action_phase * flow_apply(coupling, params.mass, phi, -t, xi);
                        CHECK(std::abs(lhs - semi.values[i]) < 1e-12);
                    }
                }
            }
        }
    }
    SUBCASE("requires q p != 0") {
        ModelParams params{0.3, 1.0, 1.0, 1.0};
        const CoherentState s = CoherentState::initial(params, {0.0, 1.5});
        const GridSpec grid = GridSpec::symmetric(5.0, 64);
        CHECK_THROWS_AS((void)semiclassical_dynamics(params, s, 1.0, grid), std::domain_error);
    }
}

TEST_CASE("semiclassical wave operator closed form") {
    SUBCASE("beta = 0 and closed gates are the identity") {
        ModelParams params{0.3, 1.0, 0.0, 1.0};
        const CoherentState s = CoherentState::initial(params, {-2.0, 1.5});
        const GridSpec grid = default_grid(params, s, 0.0);
        CHECK(l2_distance(semiclassical_waveop(params, +1, s, grid),
                          sample_state(params, s, grid)) == 0.0);
        ModelParams coupled{0.3, 1.0, 1.2, 1.0};
        const CoherentState outgoing = CoherentState::initial(coupled, {2.0, 1.5});  // q p > 0
        const GridSpec grid2 = default_grid(coupled, outgoing, 0.0);
        CHECK(l2_distance(semiclassical_waveop(coupled, +1, outgoing, grid2),
                          sample_state(coupled, outgoing, grid2)) == 0.0);
    }
    SUBCASE("matches the classical wave operator composition pointwise") {
        for (double beta : {0.8, -1.1, kInf}) {
            ModelParams params{0.3, 1.0, beta, 1.0};
            for (const PhasePoint xi : {PhasePoint{-2.0, 1.5}, PhasePoint{2.0, -1.5}}) {
                const CoherentState s = CoherentState::initial(params, xi);
                const GridSpec grid = default_grid(params, s, 0.0, 64);
                const ClassicalCoupling coupling = ClassicalCoupling::from_params(params);
                for (int sign : {+1, -1}) {
                    const WaveSample semi = semiclassical_waveop(params, sign, s, grid);
                    for (int i = 0; i < grid.n; i += 5) {
                        const double x = grid.node(i);
                        const PhaseFunction phi = [&](PhasePoint z) {
                            return phi_phase_space_eval(params, Complex{params.sigma0, 0.0}, x,
                                                        z);
                        };
                        const Complex lhs = classical_wave(coupling, params.mass, sign, phi, xi);
                        CHECK(std::abs(lhs - semi.values[i]) < 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("semiclassical scattering closed form") {
    SUBCASE("beta = 0 is the identity") {
        ModelParams params{0.3, 1.0, 0.0, 1.0};
        const CoherentState s = CoherentState::initial(params, {-2.0, 1.5});
        const GridSpec grid = default_grid(params, s, 0.0);
        CHECK(l2_distance(semiclassical_scatter(params, s, grid),
                          sample_state(params, s, grid)) == 0.0);
    }
    SUBCASE("hard-wall limit mirrors the packet") {
        ModelParams params{0.3, 1.0, kInf, 1.0};
        const CoherentState s = CoherentState::initial(params, {-2.0, 1.5});
        const GridSpec grid = default_grid(params, s, 0.0);
        const WaveSample mirrored =
            sample_state(params, CoherentState::initial(params, {2.0, -1.5}), grid);
        CHECK(l2_distance(semiclassical_scatter(params, s, grid), mirrored) < 1e-14);
    }
    SUBCASE("matches the classical scattering composition pointwise") {
        for (double beta : {0.8, -1.1}) {
            ModelParams params{0.3, 1.0, beta, 1.0};
            const PhasePoint xi{-2.0, 1.5};
            const CoherentState s = CoherentState::initial(params, xi);
            const GridSpec grid = default_grid(params, s, 0.0, 64);
            const ClassicalCoupling coupling = ClassicalCoupling::from_params(params);
            const WaveSample semi = semiclassical_scatter(params, s, grid);
            for (int i = 0; i < grid.n; i += 5) {
                const double x = grid.node(i);
                const PhaseFunction phi = [&](PhasePoint z) {
                    return phi_phase_space_eval(params, Complex{params.sigma0, 0.0}, x, z);
                };
                CHECK(std::abs(classical_scatter(coupling, params.mass, phi, xi) -
                               semi.values[i]) < 1e-12);
            }
        }
    }
}
