#include "dprime/model.hpp"

#include <cmath>
#include <numbers>

namespace dprime {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};
}  // namespace

void ModelParams::validate() const {
    if (!(hbar > 0.0)) throw std::invalid_argument("ModelParams: hbar must be > 0");
    if (!(mass > 0.0)) throw std::invalid_argument("ModelParams: mass must be > 0");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("ModelParams: sigma0 must be > 0");
    if (std::isnan(beta)) throw std::invalid_argument("ModelParams: beta must not be NaN");
}

CoherentState CoherentState::initial(const ModelParams& params, PhasePoint xi) {
    params.validate();
    CoherentState s;
    s.sigma = Complex{params.sigma0, 0.0};
    s.sigma_breve = Complex{1.0 / params.sigma0, 0.0};
    s.center = xi;
    s.phase = 0.0;
    return s;
}

void CoherentState::validate() const {
    if (!(sigma.real() > 0.0)) throw std::invalid_argument("CoherentState: Re sigma must be > 0");
    if (!(sigma_breve.real() > 0.0))
        throw std::invalid_argument("CoherentState: Re sigma_breve must be > 0");
    const double c = (std::conj(sigma) * sigma_breve).real();
    if (std::abs(c - 1.0) > 1e-12)
        throw std::invalid_argument("CoherentState: Re[conj(sigma) sigma_breve] must equal 1");
}

Complex coherent_eval(const ModelParams& params, const CoherentState& state, double x) {
    const double hbar = params.hbar;
    const double dx = x - state.center.q;
    const Complex expo = -state.sigma_breve * (dx * dx) / (4.0 * hbar * state.sigma) +
                         kI * (state.center.p * dx / hbar) + kI * state.phase;
    const Complex norm = std::pow(2.0 * kPi * hbar, -0.25) / std::sqrt(state.sigma);
    return norm * std::exp(expo);
}

Complex coherent_ft(const ModelParams& params, const CoherentState& state, double k) {
    const double hbar = params.hbar;
    const double dk = k - state.center.p / hbar;
    const Complex expo = -hbar * state.sigma / state.sigma_breve * (dk * dk) -
                         kI * (k * state.center.q) + kI * state.phase;
    const Complex norm = std::pow(2.0 * hbar / kPi, 0.25) / std::sqrt(state.sigma_breve);
    return norm * std::exp(expo);
}

CoherentState free_evolve_state(const ModelParams& params, const CoherentState& state, double t) {
    CoherentState out = state;
    out.sigma = state.sigma + kI * (t * state.sigma_breve / (2.0 * params.mass));
    out.center.q = state.center.q + state.center.p * t / params.mass;
    out.phase = state.phase +
                state.center.p * state.center.p * t / (2.0 * params.mass * params.hbar);
    return out;
}

Complex phi_phase_space_eval(const ModelParams& params, Complex sigma, double x, PhasePoint xi) {
    CoherentState state;
    state.sigma = sigma;
    state.sigma_breve = Complex{1.0 / params.sigma0, 0.0};
    state.center = xi;
    state.phase = 0.0;
    return coherent_eval(params, state, x);
}

GridSpec GridSpec::symmetric(double x_max, int n) {
    if (!(x_max > 0.0)) throw std::invalid_argument("GridSpec: x_max must be > 0");
    if (n < 2) throw std::invalid_argument("GridSpec: n must be >= 2");
    return GridSpec{x_max, n};
}

std::vector<double> GridSpec::nodes() const {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = node(i);
    return xs;
}

WaveSample sample_state(const ModelParams& params, const CoherentState& state,
                        const GridSpec& grid) {
    WaveSample w{grid, std::vector<Complex>(grid.n)};
    for (int i = 0; i < grid.n; ++i) w.values[i] = coherent_eval(params, state, grid.node(i));
    return w;
}

WaveSample reflect(const WaveSample& w) {
    WaveSample out{w.grid, std::vector<Complex>(w.values.size())};
    const int n = w.grid.n;
    for (int i = 0; i < n; ++i) out.values[i] = w.values[n - 1 - i];
    return out;
}

std::vector<double> simpson_weights(int n, double spacing) {
    if (n < 2) throw std::invalid_argument("simpson_weights: need n >= 2");
    std::vector<double> w(n, 0.0);
    if (n == 2) {
        w[0] = w[1] = spacing / 2.0;
        return w;
    }
    int m = n;
    bool tail38 = (n % 2 == 0);
    if (tail38) m = n - 3;  // 1/3 rule on the first m nodes, 3/8 rule on the rest
    if (m >= 3) {
        w[0] += spacing / 3.0;
        w[m - 1] += spacing / 3.0;
        for (int i = 1; i < m - 1; ++i) w[i] += (i % 2 == 1 ? 4.0 : 2.0) * spacing / 3.0;
    } else {
        // n == 4: plain 3/8 rule below covers everything
        m = 1;
        tail38 = true;
    }
    if (tail38) {
        const int s = m - 1;
        w[s] += 3.0 * spacing / 8.0;
        w[s + 1] += 9.0 * spacing / 8.0;
        w[s + 2] += 9.0 * spacing / 8.0;
        w[s + 3] += 3.0 * spacing / 8.0;
    }
    return w;
}

double l2_norm(const WaveSample& w) {
    const auto weights = simpson_weights(w.grid.n, w.grid.spacing());
    double acc = 0.0;
    for (int i = 0; i < w.grid.n; ++i) acc += weights[i] * std::norm(w.values[i]);
    return std::sqrt(acc);
}

double l2_distance(const WaveSample& a, const WaveSample& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("l2_distance: mismatched grids");
    const auto weights = simpson_weights(a.grid.n, a.grid.spacing());
    double acc = 0.0;
    for (int i = 0; i < a.grid.n; ++i) acc += weights[i] * std::norm(a.values[i] - b.values[i]);
    return std::sqrt(acc);
}

Complex inner_product(const WaveSample& a, const WaveSample& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner_product: mismatched grids");
    const auto weights = simpson_weights(a.grid.n, a.grid.spacing());
    Complex acc{0.0, 0.0};
    for (int i = 0; i < a.grid.n; ++i) acc += weights[i] * std::conj(a.values[i]) * b.values[i];
    return acc;
}

GridSpec default_grid(const ModelParams& params, const CoherentState& initial, double t, int n) {
    const CoherentState evolved = free_evolve_state(params, initial, t);
    const double reach = std::max(std::abs(initial.center.q), std::abs(evolved.center.q));
    const double width = std::max(params.sigma0, std::abs(evolved.sigma));
    const double x_max = reach + 12.0 * std::sqrt(params.hbar) * width;
    return GridSpec::symmetric(x_max, n);
}

}  // namespace dprime
