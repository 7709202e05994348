#pragma once

#include <utility>
#include <vector>

#include "csb/two_state.hpp"

// Reconstruction of the hidden spin vector between two spin measurements.
// The two-boundary value is linear in the Cartesian components of the
// probed direction, so Re <f|S_h|i>/<f|i> = v . h for a fixed 3-vector v.
// With both outcomes +1/2 the vector bisects the measurement axes, has
// magnitude (1/2)/cos(omega/2), and every other component follows the
// cos(theta) rule.

namespace csb {

struct SpinVectorReport {
    std::array<double, 3> vector;  // v, units of hbar
    Direction max_direction;       // v / |v|
    double max_value;              // |v|
    double omega;                  // angle between the (effective) measured axes, radians
    double midplane_residual;      // |v_hat . i_axis - v_hat . f_axis|
};

// Guard against near-antiparallel axes, where |v| diverges. Degrees.
inline constexpr double kDefaultAntiparallelGuardDeg = 1.0;

// Extracts v algebraically from the values along the three Cartesian axes.
// Outcomes other than +1/2 are handled by flipping the corresponding axis.
// Throws AntiparallelAxes when the effective axes subtend more than
// 180 - guard_deg degrees.
SpinVectorReport hidden_spin_vector(const Direction& i_axis, const Direction& f_axis,
                                    Sign outcome_i = Sign::plus, Sign outcome_f = Sign::plus,
                                    double guard_deg = kDefaultAntiparallelGuardDeg);

// Independent verification mode: locates the maximum of the two-boundary
// value by a deterministic lat-long sweep followed by local grid
// refinement. Ties break toward the lexicographically smaller direction.
SpinVectorReport hidden_spin_vector_sweep(const Direction& i_axis, const Direction& f_axis,
                                          int n_polar = 64, int n_azimuth = 128,
                                          int refine_iters = 14,
                                          double guard_deg = kDefaultAntiparallelGuardDeg);

// Two-boundary value for each probe direction, paired with the probe.
std::vector<std::pair<Direction, double>> component_map(const Direction& i_axis,
                                                        const Direction& f_axis,
                                                        const std::vector<Direction>& probes,
                                                        Sign outcome_i = Sign::plus,
                                                        Sign outcome_f = Sign::plus,
                                                        double guard_deg = kDefaultAntiparallelGuardDeg);

}  // namespace csb
