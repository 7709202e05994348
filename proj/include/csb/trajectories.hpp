#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "csb/wavepacket.hpp"

// Particle paths. Standard guidance integrates dx/dt = j/rho through a
// forward evolution. The two-boundary worldline instead follows the
// integral curve of the flow (j0, j1) in the (t, x) plane,
//     dt/dlambda = j0,   dx/dlambda = j1,
// which stays regular where the unit 4-velocity would blow up and runs
// backward in coordinate time wherever j0 < 0 ("doubling back"). Those
// sign changes are located and recorded as reversal events.

namespace csb {

// Density/current pair sampled on the (t, x) lattice of an evolution,
// with bilinear interpolation in between. For two-boundary flows rho is
// j0 (sign-indefinite) and cur is j1.
struct FlowField {
    Grid grid;
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<std::vector<double>> rho;  // [slice][point]
    std::vector<std::vector<double>> cur;
    double max_abs_rho = 0.0;

    int n_slices() const { return static_cast<int>(rho.size()); }
    double t_end() const { return t0 + (n_slices() - 1) * dt; }
    double slice_time(int s) const { return t0 + s * dt; }

    // x must lie in the sampled span; throws GridExit otherwise.
    double rho_at(double t, double x) const;
    double cur_at(double t, double x) const;
    bool x_in_range(double x) const;
};

FlowField standard_flow(const EvolutionHistory& hist);

// Pairs a forward psi_i history with a backward psi_f history at the same
// times. Throws ZeroOverlap if the boundary overlap is below threshold.
FlowField cs_flow(const EvolutionHistory& forward, const EvolutionHistory& backward,
                  double eps_overlap = kDefaultOverlapEps);

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    // Density floor, relative to the field's max |rho|.
    double eps_density_rel = 1e-12;
    long max_steps = 4'000'000;
};

struct Trajectory {
    std::vector<std::pair<double, double>> samples;  // (t, x) at slice times
    double x0 = 0.0;
    double t0 = 0.0;

    double x_at_time(double t) const;  // linear between recorded samples
    double x_final() const { return samples.back().second; }
};

// Guidance trajectory from (flow.t0, x0) to the end of the history,
// sampled at every slice time. Throws NodeEncounter when the local
// density falls below the floor, GridExit on leaving the grid.
Trajectory bohm_trajectory(const FlowField& flow, double x0,
                           const IntegratorOptions& opts = {});

enum class WorldLineStop { time_boundary, step_limit, stalled, lambda_limit };

struct WorldLineSample {
    double lambda = 0.0;
    double t = 0.0;
    double x = 0.0;
};

struct WorldLine {
    std::vector<WorldLineSample> samples;    // every accepted step plus events
    std::vector<WorldLineSample> reversals;  // j0 sign changes (doubling back)
    WorldLineStop stop_reason = WorldLineStop::time_boundary;

    // x at coordinate time t for worldlines whose t is monotone;
    // throws std::logic_error if t is not monotone over the samples.
    double x_at_time(double t) const;
};

struct WorldLineOptions {
    IntegratorOptions integ;
    double lambda_max = std::numeric_limits<double>::infinity();
    // Coordinate times at which a sample must be emitted exactly
    // (located by sub-step bisection). Must be sorted ascending.
    std::vector<double> record_times;
};

// Integral curve of (j0, j1) seeded at (t0, x0), integrated in increasing
// lambda until coordinate time leaves the history span.
WorldLine cs_worldline(const FlowField& flow, double x0, double t0,
                       const WorldLineOptions& opts = {});

enum class CausalClass { timelike, lightlike, spacelike };

struct FourVelocity {
    double u0 = 0.0;
    double u1 = 0.0;
    CausalClass cls = CausalClass::timelike;
    double rest_density = 0.0;  // |j| when timelike, else 0
    bool normalized = false;    // true only when timelike
};

// Classifies (j0, j1) by its Minkowski norm (c = 1) and, when timelike,
// returns the unit 4-velocity j/|j| and rest density |j|.
// Throws ZeroCurrent on (0, 0).
FourVelocity four_velocity(double j0, double j1);

}  // namespace csb
