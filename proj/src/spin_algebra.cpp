#include "csb/spin_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace csb {

Direction::Direction(double nx, double ny, double nz) {
    const double r = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (r < 1e-12) {
        throw std::invalid_argument("Direction: vector too close to zero to normalize");
    }
    x_ = nx / r;
    y_ = ny / r;
    z_ = nz / r;
}

Direction Direction::from_polar(double theta, double phi) {
    const double s = std::sin(theta);
    return Direction(s * std::cos(phi), s * std::sin(phi), std::cos(theta));
}

Direction Direction::operator-() const { return Direction(-x_, -y_, -z_); }

double Direction::angle_to(const Direction& o) const {
    return std::acos(std::clamp(dot(o), -1.0, 1.0));
}

double Spinor::norm() const { return std::sqrt(norm_sq()); }

Spinor Spinor::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("Spinor: cannot normalize zero spinor");
    return {up / n, dn / n};
}

cplx inner(const Spinor& bra, const Spinor& ket) {
    return std::conj(bra.up) * ket.up + std::conj(bra.dn) * ket.dn;
}

SpinOp spin_operator(const Direction& n) {
    // (n . sigma) / 2 written out.
    return {0.5 * cplx(n.z(), 0.0), 0.5 * cplx(n.x(), -n.y()),
            0.5 * cplx(n.x(), n.y()), 0.5 * cplx(-n.z(), 0.0)};
}

Spinor fix_phase(const Spinor& s) {
    cplx lead = s.up;
    if (std::abs(lead) == 0.0) lead = s.dn;
    const double r = std::abs(lead);
    if (r == 0.0) return s;
    return s.scaled(std::conj(lead) / r);
}

Spinor eigenspinor(const Direction& n, Sign sign) {
    const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    double phi = 0.0;
    if (n.x() != 0.0 || n.y() != 0.0) phi = std::atan2(n.y(), n.x());
    const cplx eip(std::cos(phi), std::sin(phi));
    Spinor chi;
    if (sign == Sign::plus) {
        chi = {cplx(c, 0.0), s * eip};
    } else {
        chi = {cplx(s, 0.0), -c * eip};
    }
    return fix_phase(chi);
}

double MultiSpinState::norm_sq() const {
    double t = 0.0;
    for (const auto& a : amp) t += std::norm(a);
    return t;
}

double MultiSpinState::norm() const { return std::sqrt(norm_sq()); }

MultiSpinState MultiSpinState::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("MultiSpinState: cannot normalize zero state");
    MultiSpinState out;
    for (int i = 0; i < 4; ++i) out.amp[i] = amp[i] / n;
    return out;
}

MultiSpinState tensor(const Spinor& p1, const Spinor& p2) {
    return {{p1.up * p2.up, p1.up * p2.dn, p1.dn * p2.up, p1.dn * p2.dn}};
}

MultiSpinState apply_on_particle(const SpinOp& op, int particle, const MultiSpinState& s) {
    if (particle != 1 && particle != 2) {
        throw std::invalid_argument("apply_on_particle: particle index must be 1 or 2");
    }
    MultiSpinState out;
    if (particle == 1) {
        // Acts on the first index: amp[2*j + k], j in {0,1}.
        for (int k = 0; k < 2; ++k) {
            out.amp[0 + k] = op.m00 * s.amp[0 + k] + op.m01 * s.amp[2 + k];
            out.amp[2 + k] = op.m10 * s.amp[0 + k] + op.m11 * s.amp[2 + k];
        }
    } else {
        for (int j = 0; j < 2; ++j) {
            out.amp[2 * j + 0] = op.m00 * s.amp[2 * j + 0] + op.m01 * s.amp[2 * j + 1];
            out.amp[2 * j + 1] = op.m10 * s.amp[2 * j + 0] + op.m11 * s.amp[2 * j + 1];
        }
    }
    return out;
}

cplx inner2(const MultiSpinState& bra, const MultiSpinState& ket) {
    cplx t(0.0, 0.0);
    for (int i = 0; i < 4; ++i) t += std::conj(bra.amp[i]) * ket.amp[i];
    return t;
}

MultiSpinState singlet() {
    const double r = 1.0 / std::sqrt(2.0);
    return {{cplx(0.0), cplx(r), cplx(-r), cplx(0.0)}};
}

}  // namespace csb
