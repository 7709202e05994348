#include "csb/two_state.hpp"

#include <cmath>
#include <string>

namespace csb {

TwoStateContext TwoStateContext::make(const Spinor& pre, const Spinor& post, double eps) {
    const cplx a = inner(post, pre);
    if (std::abs(a) <= eps) {
        throw ZeroOverlap("two-state context: |<f|i>| = " + std::to_string(std::abs(a)) +
                          " <= " + std::to_string(eps) +
                          "; post-selection incompatible with pre-selection");
    }
    return {pre, post, a};
}

cplx weak_spin_value_complex(const TwoStateContext& ctx, const Direction& h) {
    const SpinOp op = spin_operator(h);
    return inner(ctx.post, op.apply(ctx.pre)) / ctx.overlap;
}

double weak_spin_value(const TwoStateContext& ctx, const Direction& h) {
    return weak_spin_value_complex(ctx, h).real();
}

EntangledContext EntangledContext::make(const MultiSpinState& initial, const Direction& axis1,
                                        const Direction& axis2, Sign outcome1, Sign outcome2,
                                        double eps) {
    const MultiSpinState bra = tensor(eigenspinor(axis1, outcome1), eigenspinor(axis2, outcome2));
    const cplx a = inner2(bra, initial);
    if (std::abs(a) <= eps) {
        throw ZeroOverlap("entangled context: |<e_m,f_n|I>| = " + std::to_string(std::abs(a)) +
                          " <= " + std::to_string(eps));
    }
    return {initial, axis1, axis2, outcome1, outcome2, a};
}

double born_joint(const MultiSpinState& I, const Direction& e, const Direction& f, Sign m,
                  Sign n) {
    const MultiSpinState bra = tensor(eigenspinor(e, m), eigenspinor(f, n));
    return std::norm(inner2(bra, I));
}

Spinor conditional_state(const MultiSpinState& I, const Direction& e, Sign m, double eps) {
    const Spinor chi = eigenspinor(e, m);
    // <chi| acting on particle 1 leaves a particle-2 spinor.
    Spinor branch{std::conj(chi.up) * I.amp[0] + std::conj(chi.dn) * I.amp[2],
                  std::conj(chi.up) * I.amp[1] + std::conj(chi.dn) * I.amp[3]};
    const double n = branch.norm();
    if (n <= eps) {
        throw ZeroBranch("conditional_state: branch norm " + std::to_string(n) +
                         " <= " + std::to_string(eps));
    }
    return branch.scaled(cplx(1.0 / n, 0.0));
}

double entangled_weak_value(const EntangledContext& ctx, const Direction& h) {
    const MultiSpinState bra =
        tensor(eigenspinor(ctx.axis1, ctx.outcome1), eigenspinor(ctx.axis2, ctx.outcome2));
    const MultiSpinState hI = apply_on_particle(spin_operator(h), 2, ctx.initial);
    return (inner2(bra, hI) / ctx.overlap).real();
}

double reduced_weak_value(const EntangledContext& ctx, const Direction& h) {
    const Spinor i2 = conditional_state(ctx.initial, ctx.axis1, ctx.outcome1);
    const Spinor fn = eigenspinor(ctx.axis2, ctx.outcome2);
    const TwoStateContext sub = TwoStateContext::make(i2, fn);
    return weak_spin_value(sub, h);
}

}  // namespace csb
