#pragma once

#include <array>
#include <optional>
#include <string>

#include "dprime/propagate.hpp"

namespace dprime {

class AdmissibilityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepKind { Dynamics, WaveOpPlus, WaveOpMinus, Scatter };
const char* to_string(SweepKind kind);
std::optional<SweepKind> sweep_kind_from(const std::string& name);

/// eta selection: the scaling rule eta = underline_h^{1/2 - lambda}, or a
/// fixed value for bound-shape studies.
struct EtaRule {
    bool scaling = true;
    double fixed_eta = 0.25;

    double eta(double uh, double lambda) const {
        return scaling ? std::pow(uh, 0.5 - lambda) : fixed_eta;
    }
};

struct RegimeParams {
    double lambda = 0.1;
    double c0 = 3.0;
    EtaRule eta_rule{};

    void validate() const;
};

struct SweepRecord {
    double hbar = 0.0;
    double underline_h = 0.0;
    double error_l2 = 0.0;
    double bound_rhs = 0.0;
    double t = 0.0;
    SweepKind kind = SweepKind::Dynamics;
    double wall_time = 0.0;
};

/// underline_h = max{hbar sigma0^2/q^2, hbar/(sigma0^2 p^2), hbar/(m|beta p|)^{1/3}}.
/// Throws std::domain_error when q p = 0 or beta = 0.
double underline_h(const ModelParams& params, PhasePoint xi);

/// t_coll = -m q / p; throws std::domain_error when p = 0.
double collision_time(PhasePoint xi, double mass);

/// |t - t_coll| >= c0 |t_coll| sqrt((7/2 - lambda) h |ln h|).
bool admissible_time(double t, PhasePoint xi, const RegimeParams& regime, double mass, double uh);

/// The six bracket terms of the dynamics error bound (constant-free):
/// {eta term, eta-window exponential, position tail, momentum tail,
///  bound-state projection term, collision term}.
std::array<double, 6> dynamics_bound_terms(const ModelParams& params, PhasePoint xi, double t,
                                           double eta);
double dynamics_bound(const ModelParams& params, PhasePoint xi, double t, double eta);

/// Constant-free right side of the wave/scattering error bound (the
/// scattering variant adds the bound-state projection term).
double waveop_bound(const ModelParams& params, PhasePoint xi, double eta, bool with_projection);

/// ||e^{-itH_beta/hbar} psi||, with the generic jump of the evolved state at
/// x = 0 respected: Simpson on each half-line, targets just off the origin.
double quantum_state_norm(const ModelParams& params, const CoherentState& state, double t,
                          const QuadratureOptions& opts = {});

/// <U_t psi, U_t phi> with the same half-line splitting.
Complex quantum_inner_product(const ModelParams& params, const CoherentState& a,
                              const CoherentState& b, double t,
                              const QuadratureOptions& opts = {});

/// L^2 distances between the exact quantum objects and their closed-form
/// semiclassical approximants.
double dynamics_error(const ModelParams& params, PhasePoint xi, double t, const GridSpec& grid,
                      const QuadratureOptions& opts = {});
double waveop_error(const ModelParams& params, int sign, PhasePoint xi, const GridSpec& grid,
                    const QuadratureOptions& opts = {});
double scatter_error(const ModelParams& params, PhasePoint xi, const GridSpec& grid,
                     const QuadratureOptions& opts = {});

/// Grid used by the sweep harness: the default 12-sigma rule, refined so the
/// fastest spatial fringe of the compared states stays alias-free.
GridSpec experiment_grid(const ModelParams& params, PhasePoint xi, double t, SweepKind kind,
                         const QuadratureOptions& opts = {});

/// Default 9-point geometric hbar grid from 1e-1, factor 0.67.
std::vector<double> default_hbar_grid();

/// Dynamics time samples {0.5, 2, 4} * t_coll filtered by admissible_time.
std::vector<double> default_times(const ModelParams& params, PhasePoint xi,
                                  const RegimeParams& regime);

/// One record per (hbar, t) pair ((hbar) alone for the time-independent
/// kinds). Explicitly given dynamics times must be admissible at every hbar;
/// an empty times list selects the default rule, filtered per hbar. Records
/// are computed in parallel and returned in deterministic input order.
std::vector<SweepRecord> run_sweep(const ModelParams& base, PhasePoint xi,
                                   const RegimeParams& regime, std::span<const double> hbar_grid,
                                   std::span<const double> times, SweepKind kind,
                                   const QuadratureOptions& opts = {});

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares of ln(error_l2) against ln(underline_h).
SlopeFit fit_slope(std::span<const SweepRecord> records);

}  // namespace dprime
