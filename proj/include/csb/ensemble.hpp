#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "csb/trajectories.hpp"

// Statistical layer: position sampling from |psi|^2, the packet-separation
// measurement experiment that recovers the Born rule from trajectory
// counting, the equivariance test, and the deterministic weighted-average
// identity (summing the two-boundary current over a complete final basis,
// weighted by outcome probabilities, returns the standard current).

namespace csb {

// Inverse-CDF sampling on the grid with a piecewise-linear CDF.
// Deterministic for a fixed seed (see Rng for the stream identity).
std::vector<double> sample_positions(const GridWavefunction& psi, int n, std::uint64_t seed);

// Two-outcome measurement modeled as momentum-split packets: both branches
// share one Gaussian envelope and receive opposite kicks +-k_sep at step
// `split_step`; free flight then separates them into disjoint beams and
// the sign of the final position classifies the outcome. The branches are
// tagged by orthogonal internal states, so they never interfere: the
// guiding flow is the |c_m|^2-weighted sum of the per-branch flows and the
// relative phase of the coefficients is unobservable.
struct MeasurementSetup {
    Grid grid;
    double packet_center = 0.0;
    double packet_sigma = 1.0;
    double k_sep = 5.0;
    std::array<cplx, 2> coefficients{};  // must satisfy sum |c|^2 = 1
    double dt = 0.01;
    int split_step = 0;   // kick applied after this many steps
    int total_steps = 0;  // full schedule length
    double overlap_tol = 1e-6;

    void validate() const;  // throws std::invalid_argument
};

struct EnsembleRun {
    std::uint64_t seed = 0;
    int n_particles = 0;
    std::array<long, 2> outcome_counts{};
    std::array<double, 2> expected{};  // |c_m|^2
    double max_ks_statistic = 0.0;     // endpoints vs |psi(T)|^2
};

// Runs the full experiment: build the branched state, evolve, check the
// final branch overlap (PacketsNotSeparated if >= overlap_tol), sample
// quantum-equilibrium start positions, integrate one trajectory each and
// tally the outcomes. Frequencies estimate |c_m|^2.
EnsembleRun born_experiment(const MeasurementSetup& setup, int n, std::uint64_t seed,
                            const IntegratorOptions& integ = {});

// Transports `start_positions` (sampled at hist.t_begin()) to t_check and
// returns the Kolmogorov-Smirnov distance between the endpoints and the
// CDF of |psi(x, t_check)|^2. t_check must land on a stored slice.
double equivariance_check(const EvolutionHistory& hist, const std::vector<double>& start_positions,
                          double t_check, const IntegratorOptions& integ = {});

// One-sample KS distance between sorted-able samples and a reference CDF
// given as (x_j, F_j) nodes with linear interpolation.
double ks_statistic(std::vector<double> samples, const std::vector<double>& xs,
                    const std::vector<double>& cdf);

// Critical value sqrt(-ln(alpha/2)/2)/sqrt(n) of the one-sample KS test.
double ks_critical_value(int n, double alpha);

// Checks that the final basis resolves the identity under the trapezoidal
// inner product (IncompleteBasis otherwise), then returns
//   max_x | sum_f j_cs(x | i, f) P(f|i)  -  j_standard(x) |
// with P(f|i) = |<f|i>|^2. Terms whose overlap is at or below eps_overlap
// contribute exactly zero. The identity is exact on the grid, so the
// deviation is pure roundoff for a genuinely complete basis.
double appendix_average_check(const GridWavefunction& psi_i,
                              const std::vector<GridWavefunction>& final_basis,
                              double eps_overlap = kDefaultOverlapEps,
                              double completeness_tol = 1e-10);

// n orthonormal-complete plane waves on the grid (DFT columns rescaled to
// the trapezoidal inner product).
std::vector<GridWavefunction> plane_wave_basis(const Grid& grid, double time = 0.0);

// Complete basis whose first element is psi_i itself; the rest fill the
// orthogonal complement by Gram-Schmidt over the plane waves.
std::vector<GridWavefunction> basis_containing(const GridWavefunction& psi_i);

}  // namespace csb
