#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dprime/model.hpp"

using namespace dprime;

namespace {
const ModelParams kUnit{1.0, 1.0, 0.0, 1.0};

CoherentState generic_state() {
    CoherentState s;
    s.sigma = Complex{0.8, 0.5};
    s.center = {1.5, -0.7};
    s.phase = 0.4;
    // Re[conj(sigma) sigma_breve] = 1 with Im sigma_breve = 0.3
    const double bi = 0.3;
    s.sigma_breve = Complex{(1.0 - s.sigma.imag() * bi) / s.sigma.real(), bi};
    return s;
}
}  // namespace

TEST_CASE("coherent_eval basics") {
    const CoherentState ground = CoherentState::initial(kUnit, {0.0, 0.0});
    // (2 pi)^(-1/4)
    CHECK(coherent_eval(kUnit, ground, 0.0).real() ==
          doctest::Approx(0.6316187777460647).epsilon(1e-14));
    CHECK(coherent_eval(kUnit, ground, 0.0).imag() == doctest::Approx(0.0));

    const CoherentState s = generic_state();
    s.validate();
    const GridSpec grid = default_grid(kUnit, s, 0.0);
    CHECK(l2_norm(sample_state(kUnit, s, grid)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("coherent_eval reflection symmetry is exact") {
    ModelParams params = kUnit;
    params.hbar = 0.3;
    CoherentState s = CoherentState::initial(params, {1.25, -2.5});
    s.phase = 0.9;
    CoherentState m = s;
    m.center = -s.center;
    for (double x : {-3.0, -0.5, 0.0, 0.25, 4.0}) {
        const Complex a = coherent_eval(params, m, x);
        const Complex b = coherent_eval(params, s, -x);
        CHECK(a.real() == b.real());
        CHECK(a.imag() == b.imag());
    }
}

TEST_CASE("coherent_ft peak and Parseval") {
    const CoherentState ground = CoherentState::initial(kUnit, {0.0, 0.0});
    // k = 0 at q = p = 0: (2/pi)^(1/4)
    CHECK(coherent_ft(kUnit, ground, 0.0).real() ==
          doctest::Approx(0.8932438417380023).epsilon(1e-14));

    ModelParams params = kUnit;
    params.hbar = 0.5;
    CoherentState s = CoherentState::initial(params, {1.0, 2.0});
    // peak value at k = p/hbar with q = 0, phase = 0
    s.center.q = 0.0;
    const Complex peak = coherent_ft(params, s, s.center.p / params.hbar);
    const Complex want = std::pow(2.0 * params.hbar / std::numbers::pi, 0.25) /
                         std::sqrt(s.sigma_breve);
    CHECK(std::abs(peak - want) < 1e-15);

    // Parseval by quadrature over the momentum window
    s = generic_state();
    const double kc = s.center.p / params.hbar;
    const double w = 12.0 * std::abs(s.sigma_breve) / std::sqrt(params.hbar);
    const int n = 4001;
    const double h = 2.0 * w / (n - 1);
    const auto sw = simpson_weights(n, h);
    double mass = 0.0;
    for (int i = 0; i < n; ++i)
        mass += sw[i] * std::norm(coherent_ft(params, s, kc - w + i * h));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("free evolution closed form") {
    ModelParams params = kUnit;
    const CoherentState s0 = CoherentState::initial(params, {1.0, 2.0});

    SUBCASE("t = 0 is the identity") {
        const CoherentState s = free_evolve_state(params, s0, 0.0);
        CHECK(s.sigma == s0.sigma);
        CHECK(s.sigma_breve == s0.sigma_breve);
        CHECK(s.center.q == s0.center.q);
        CHECK(s.phase == s0.phase);
    }
    SUBCASE("sigma_t = 1 + i at t = 2 (m = sigma0 = 1)") {
        const CoherentState s = free_evolve_state(params, s0, 2.0);
        CHECK(s.sigma.real() == doctest::Approx(1.0));
        CHECK(s.sigma.imag() == doctest::Approx(1.0));
        CHECK(s.sigma_breve == s0.sigma_breve);
    }
    SUBCASE("action increment p^2 t / (2m)") {
        const CoherentState s = free_evolve_state(params, s0, 1.0);
        CHECK(s.phase - s0.phase == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(s.center.q == doctest::Approx(3.0));
        CHECK(s.center.p == doctest::Approx(2.0));
    }
    SUBCASE("group law and constraint preservation") {
        for (double t : {-3.7, 0.9, 4.2}) {
            for (double u : {-1.1, 2.6}) {
                const CoherentState a =
                    free_evolve_state(params, free_evolve_state(params, s0, u), t);
                const CoherentState b = free_evolve_state(params, s0, t + u);
                CHECK(std::abs(a.sigma - b.sigma) < 1e-12);
                CHECK(std::abs(a.center.q - b.center.q) < 1e-12);
                CHECK(std::abs(a.phase - b.phase) < 1e-12);
                CHECK(std::abs((std::conj(a.sigma) * a.sigma_breve).real() - 1.0) < 1e-14);
            }
        }
    }
    SUBCASE("sampled norm stays 1 over [-10, 10]") {
        for (double t = -10.0; t <= 10.0; t += 2.0) {
            const CoherentState st = free_evolve_state(params, s0, t);
            const GridSpec grid = default_grid(params, s0, t);
            CHECK(l2_norm(sample_state(params, st, grid)) ==
                  doctest::Approx(1.0).epsilon(1e-8));
        }
    }
    SUBCASE("free evolution reproduces e^{-itH_0/hbar} psi pointwise") {
        // oracle: free propagator via momentum-space quadrature
        const double t = 1.3;
        const CoherentState st = free_evolve_state(params, s0, t);
        const double kc = s0.center.p / params.hbar;
        const double w = 14.0;
        const int n = 8001;
        const double h = 2.0 * w / (n - 1);
        const auto sw = simpson_weights(n, h);
        for (double x : {-1.0, 2.1, 4.4}) {
            Complex acc{0.0, 0.0};
            for (int i = 0; i < n; ++i) {
                const double k = kc - w + i * h;
                const Complex chirp =
                    std::exp(Complex{0.0, -params.hbar * t * k * k / (2.0 * params.mass)});
                acc += sw[i] * chirp * coherent_ft(params, s0, k) *
                       std::exp(Complex{0.0, k * x});
            }
            acc /= std::sqrt(2.0 * std::numbers::pi);
            CHECK(std::abs(acc - coherent_eval(params, st, x)) < 1e-10);
        }
    }
}

TEST_CASE("phi phase-space evaluation") {
    ModelParams params = kUnit;
    params.sigma0 = 1.0;
    const PhasePoint xi{0.7, -1.2};
    const Complex sigma{1.0, 0.4};
    CoherentState s;
    s.sigma = sigma;
    s.sigma_breve = Complex{1.0, 0.0};
    s.center = xi;
    const Complex a = phi_phase_space_eval(params, sigma, 0.3, xi);
    const Complex b = coherent_eval(params, s, 0.3);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());

    // phi_{sigma,x}(-xi) = phi_{sigma,-x}(xi)
    const Complex l = phi_phase_space_eval(params, sigma, 0.3, -xi);
    const Complex r = phi_phase_space_eval(params, sigma, -0.3, xi);
    CHECK(l.real() == r.real());
    CHECK(l.imag() == r.imag());

    CHECK(phi_phase_space_eval(params, Complex{1.0, 0.0}, 0.0, PhasePoint{0.0, 0.0}).real() ==
          doctest::Approx(0.6316187777460647).epsilon(1e-14));
}

TEST_CASE("grid symmetry and L2 metrics") {
    const GridSpec grid = GridSpec::symmetric(5.0, 4096);
    for (int i : {0, 1, 777, 2048, 4095}) {
        CHECK(grid.node(i) == -grid.node(grid.n - 1 - i));
    }

    ModelParams params = kUnit;
    const CoherentState s = CoherentState::initial(params, {1.0, 2.0});
    const GridSpec g = default_grid(params, s, 0.0);
    const WaveSample a = sample_state(params, s, g);

    SUBCASE("distance to self is zero, to zero is the norm") {
        CHECK(l2_distance(a, a) == 0.0);
        WaveSample zero{g, std::vector<Complex>(g.n, Complex{0.0, 0.0})};
        CHECK(l2_distance(a, zero) == doctest::Approx(1.0).epsilon(1e-8));
        // homogeneity
        WaveSample scaled_a = a;
        for (auto& v : scaled_a.values) v *= Complex{0.3, -0.4};
        CHECK(l2_distance(scaled_a, zero) == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("mismatched grids throw") {
        const WaveSample b{GridSpec::symmetric(g.x_max, g.n + 1),
                           std::vector<Complex>(g.n + 1)};
        CHECK_THROWS_AS((void)l2_distance(a, b), std::invalid_argument);
    }
    SUBCASE("reflection is the exact node permutation") {
        const WaveSample direct = sample_state(params, CoherentState::initial(params, {-1.0, -2.0}), g);
        const WaveSample mirrored = reflect(a);
        for (int i = 0; i < g.n; ++i) {
            CHECK(direct.values[i].real() == mirrored.values[i].real());
            CHECK(direct.values[i].imag() == mirrored.values[i].imag());
        }
    }
}

TEST_CASE("simpson weights integrate cubics exactly") {
    for (int n : {5, 8, 9, 101, 4096}) {
        const double lo = -1.0, hi = 2.0;
        const double h = (hi - lo) / (n - 1);
        const auto w = simpson_weights(n, h);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = lo + i * h;
            acc += w[i] * (x * x * x - 2.0 * x + 1.0);
        }
        CHECK(acc == doctest::Approx(3.75).epsilon(1e-12));  // Int_{-1}^{2} x^3-2x+1 dx
    }
}

TEST_CASE("parameter validation") {
    const ModelParams bad_hbar{-1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(bad_hbar.validate(), std::invalid_argument);
    const ModelParams bad_sigma{1.0, 1.0, 0.0, -2.0};
    CHECK_THROWS_AS(bad_sigma.validate(), std::invalid_argument);
    ModelParams params = kUnit;
    params.beta = -0.5;
    CHECK(params.classical_coupling() == doctest::Approx(1.0));
    CoherentState bad = CoherentState::initial(params, {1.0, 1.0});
    bad.sigma_breve = Complex{2.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
