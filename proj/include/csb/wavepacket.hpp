#pragma once

#include <optional>
#include <vector>

#include "csb/spin_algebra.hpp"
#include "csb/two_state.hpp"

// 1D Schrodinger evolution on a uniform grid (hbar = m = 1) plus the two
// probability-flow fields built from it:
//   standard:          rho = |psi|^2,          j = Im(psi* d_x psi)
//   causally symmetric: j0 = Re(psi_f^+ psi_i / a),
//                       j1 = Re[(psi_f^+ d_x psi_i - d_x psi_f^+ psi_i) / (2i a)]
// with a the grid inner product <psi_f|psi_i>. The initial state evolves
// forward, the final state backward; j0 integrates to 1 by construction
// and may go negative pointwise.
//
// Evolution is split-step Fourier with periodic wrap, which keeps the
// discrete norm exact and makes backward evolution the exact inverse of
// forward (conjugate, evolve, conjugate). The packet-tail invariant below
// keeps wrap-around out of every admissible state.

namespace csb {

// Uniform periodic-style grid: points x_j = x_min + j*dx, j = 0..n-1,
// dx = (x_max - x_min)/n.
struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;

    Grid() = default;
    Grid(double x_min_, double x_max_, int n_points_);

    double dx() const { return (x_max - x_min) / n_points; }
    double x(int j) const { return x_min + j * dx(); }
    double length() const { return x_max - x_min; }
    // Trapezoidal quadrature weight of point j over the sampled span.
    double weight(int j) const { return (j == 0 || j == n_points - 1) ? 0.5 * dx() : dx(); }

    bool operator==(const Grid& o) const = default;
};

// Fraction of points at each edge covered by the tail-decay invariant and
// the relative amplitude bound required there.
inline constexpr double kTailFraction = 0.05;
inline constexpr double kTailRelBound = 1e-8;

struct GridWavefunction {
    Grid grid;
    std::vector<cplx> amp;  // length grid.n_points
    double time = 0.0;
    // Optional spin factor for product-form spinor packets; evolution
    // leaves it untouched (no magnetic coupling in this model).
    std::optional<Spinor> spin;
};

struct FieldPair {
    std::vector<double> density;
    std::vector<double> current;
    double time = 0.0;
};

// True when |amp| over the outer kTailFraction of each edge stays below
// kTailRelBound times the global maximum.
bool tails_ok(const Grid& grid, const std::vector<cplx>& amp);

// Normalized Gaussian packet exp(-(x-x0)^2/(2 sigma^2) + i k x); sigma is
// the wavefunction width, so the density std is sigma/sqrt(2). Throws
// PacketTooWide when the tail invariant fails on this grid.
GridWavefunction make_gaussian(const Grid& grid, double x0, double sigma, double k,
                               std::optional<Spinor> spin = std::nullopt);

// Trapezoidal <a|b> over the grid; includes the spinor inner product when
// both states carry spin.
cplx grid_inner(const GridWavefunction& a, const GridWavefunction& b);

double grid_norm(const GridWavefunction& a);

// Multiplies by exp(i k x) pointwise (momentum kick).
GridWavefunction momentum_kick(const GridWavefunction& psi, double k);

// Evolves steps * dt forward; potential is either empty (free) or one
// sample per grid point. Throws UnstableStep on dt <= 0 or if the state
// reaches the grid boundary.
GridWavefunction evolve(const GridWavefunction& psi, double dt, int steps,
                        const std::vector<double>& potential = {});

// Uniformly spaced snapshots of an evolution, slice j at t0 + j*dt.
struct EvolutionHistory {
    std::vector<GridWavefunction> slices;
    double dt = 0.0;

    const Grid& grid() const { return slices.front().grid; }
    int n_slices() const { return static_cast<int>(slices.size()); }
    double t_begin() const { return slices.front().time; }
    double t_end() const { return slices.back().time; }
};

EvolutionHistory evolve_history(const GridWavefunction& psi0, double dt, int steps,
                                const std::vector<double>& potential = {});

// Solves for psi_f at the `steps` times preceding psi_f_at_tf.time, i.e.
// the backward-in-time spread of a final condition. Returned slices are in
// ascending time order and end with the input state. Running evolve on the
// first slice reproduces the input exactly (backward is the exact inverse
// of forward).
EvolutionHistory evolve_final_backward(const GridWavefunction& psi_f_at_tf, double dt, int steps,
                                       const std::vector<double>& potential = {});

// rho = |psi|^2 and j = Im(psi* d_x psi), centered differences (one-sided
// at the edges, where the tails make the error negligible).
FieldPair current_standard(const GridWavefunction& psi);

// Two-boundary flow fields (j0, j1) at the common time of psi_i and psi_f.
// Throws ZeroOverlap when |<psi_f|psi_i>| <= eps_overlap.
FieldPair current_cs(const GridWavefunction& psi_i, const GridWavefunction& psi_f,
                     double eps_overlap = kDefaultOverlapEps);

// Spin-component density Re[psi_f^+ S_h psi_i / a](x): how the h spin
// component is spread through space between the two boundary conditions.
// Its trapezoidal integral equals the two-boundary spin value exactly.
// Both states must carry spin.
std::vector<double> spin_density(const GridWavefunction& psi_i, const GridWavefunction& psi_f,
                                 const Direction& h, double eps_overlap = kDefaultOverlapEps);

// Density-weighted moments over the grid.
double mean_x(const GridWavefunction& psi);
double std_x(const GridWavefunction& psi);
// Spectral momentum expectation (exact for grid-resolved packets).
double mean_p(const GridWavefunction& psi);

}  // namespace csb
