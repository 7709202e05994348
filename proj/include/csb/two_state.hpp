#pragma once

#include "csb/spin_algebra.hpp"

// Two-boundary spin values: a pre-selected state |i> and a post-selected
// outcome |f> jointly assign a definite value Re <f|S_h|i> / <f|i> to every
// spin component h at intermediate times. The entangled two-particle
// variant conditions on both outcomes and reduces exactly to the
// single-particle form.

namespace csb {

// Threshold below which <f|i> counts as vanishing and two-boundary values
// are refused rather than allowed to blow up.
inline constexpr double kDefaultOverlapEps = 1e-10;

// Pre-selected state, post-selected outcome, and their overlap.
struct TwoStateContext {
    Spinor pre;
    Spinor post;
    cplx overlap;  // <post|pre>

    // Throws ZeroOverlap when |<post|pre>| <= eps.
    static TwoStateContext make(const Spinor& pre, const Spinor& post,
                                double eps = kDefaultOverlapEps);
};

// Re <f|S_h|i> / <f|i>, units of hbar. Continuous in h; generally not an
// eigenvalue of S_h.
double weak_spin_value(const TwoStateContext& ctx, const Direction& h);

// Same ratio without discarding the imaginary part (diagnostics only).
cplx weak_spin_value_complex(const TwoStateContext& ctx, const Direction& h);

// Entangled pair with both future outcomes specified: particle 1 measured
// along axis1 with result outcome1, particle 2 along axis2 with outcome2.
struct EntangledContext {
    MultiSpinState initial;
    Direction axis1;
    Direction axis2;
    Sign outcome1;
    Sign outcome2;
    cplx overlap;  // <e_m, f_n | I>

    static EntangledContext make(const MultiSpinState& initial, const Direction& axis1,
                                 const Direction& axis2, Sign outcome1, Sign outcome2,
                                 double eps = kDefaultOverlapEps);
};

// |<e_m, f_n | I>|^2. Requires I normalized; the four outcomes then sum to 1.
double born_joint(const MultiSpinState& I, const Direction& e, const Direction& f, Sign m,
                  Sign n);

// Single-particle state assigned to particle 2 once particle 1's outcome is
// known: project particle 1 onto its outcome eigenspinor and normalize what
// remains. Basis-independent. Throws ZeroBranch on a vanishing branch.
Spinor conditional_state(const MultiSpinState& I, const Direction& e, Sign m,
                         double eps = kDefaultOverlapEps);

// Particle 2's h-component between the preparation of I and the two
// measurements: Re <e_m, f_n| (1 (x) S_h) |I> / <e_m, f_n | I>.
double entangled_weak_value(const EntangledContext& ctx, const Direction& h);

// Same value computed the single-particle way: condition particle 2 on
// outcome1, then take the ordinary two-boundary value against outcome2.
// Agrees with entangled_weak_value identically.
double reduced_weak_value(const EntangledContext& ctx, const Direction& h);

}  // namespace csb
