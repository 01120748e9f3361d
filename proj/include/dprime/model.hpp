#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace dprime {

using Complex = std::complex<double>;

/// sgn with sgn(0) = 0.
inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Heaviside step with theta(0) = 0.
inline double heaviside(double x) { return x > 0.0 ? 1.0 : 0.0; }

/// Physical constants of the model. beta may be 0 (free particle) or
/// +/-infinity (hard wall limit, reflection amplitudes become +/-sgn(k)).
struct ModelParams {
    double hbar = 1.0;
    double mass = 1.0;
    double beta = 0.0;
    double sigma0 = 1.0;

    void validate() const;
    bool is_free() const { return beta == 0.0; }
    /// b = -2 beta / hbar^3, the coupling of the matching singular classical flow.
    double classical_coupling() const { return -2.0 * beta / (hbar * hbar * hbar); }
};

struct PhasePoint {
    double q = 0.0;
    double p = 0.0;
    PhasePoint operator-() const { return {-q, -p}; }
};

/// Gaussian wave packet psi(sigma, sigma_breve, q, p; x) with an extra global
/// phase (accumulated action over hbar, in radians). Valid states satisfy
/// Re sigma > 0, Re sigma_breve > 0 and Re[conj(sigma) sigma_breve] = 1, which
/// forces unit L^2 norm.
struct CoherentState {
    Complex sigma{1.0, 0.0};
    Complex sigma_breve{1.0, 0.0};
    PhasePoint center{};
    double phase = 0.0;

    /// The t = 0 packet: sigma = sigma0, sigma_breve = 1/sigma0.
    static CoherentState initial(const ModelParams& params, PhasePoint xi);
    void validate() const;
};

Complex coherent_eval(const ModelParams& params, const CoherentState& state, double x);

/// Momentum representation, (1/sqrt(2 pi)) Int e^{-ikx} psi(x) dx in closed form.
Complex coherent_ft(const ModelParams& params, const CoherentState& state, double k);

/// Exact free evolution: sigma += i t sigma_breve / (2m), center drifts,
/// phase gains p^2 t / (2 m hbar). sigma_breve is unchanged.
CoherentState free_evolve_state(const ModelParams& params, const CoherentState& state, double t);

/// The phase-space function x -> psi(sigma, 1/sigma0, q, p; x) read as a
/// function of xi = (q, p) at fixed x.
Complex phi_phase_space_eval(const ModelParams& params, Complex sigma, double x, PhasePoint xi);

/// Uniform grid symmetric about 0. Nodes are (2i - (n-1)) * (x_max / (n-1)),
/// so x -> -x is an exact node permutation i -> n-1-i.
struct GridSpec {
    double x_max = 0.0;
    int n = 0;

    static GridSpec symmetric(double x_max, int n);
    double spacing() const { return 2.0 * x_max / (n - 1); }
    double node(int i) const { return (2.0 * i - (n - 1)) * (x_max / (n - 1)); }
    std::vector<double> nodes() const;
    bool operator==(const GridSpec&) const = default;
};

struct WaveSample {
    GridSpec grid;
    std::vector<Complex> values;
};

WaveSample sample_state(const ModelParams& params, const CoherentState& state, const GridSpec& grid);

/// w(x) -> w(-x), exact node permutation.
WaveSample reflect(const WaveSample& w);

/// Composite Simpson weights (3/8 rule on the last three panels when the
/// node count is even).
std::vector<double> simpson_weights(int n, double spacing);

double l2_norm(const WaveSample& w);
/// Simpson approximation of ||a - b||_{L^2}. Throws std::invalid_argument on
/// mismatched grids.
double l2_distance(const WaveSample& a, const WaveSample& b);
Complex inner_product(const WaveSample& a, const WaveSample& b);

/// Default grid rule: x_max = max(|q|, |q_t|) + 12 sqrt(hbar) max(sigma0, |sigma_t|),
/// n = 4096 unless a finer mesh is requested.
GridSpec default_grid(const ModelParams& params, const CoherentState& initial, double t, int n = 4096);

}  // namespace dprime
