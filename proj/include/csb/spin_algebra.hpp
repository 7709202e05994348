#pragma once

#include <array>
#include <complex>

#include "csb/errors.hpp"

// Exact dense complex algebra for one- and two-spin-1/2 systems.
// Conventions used throughout:
//   * hbar = 1; spin operators have eigenvalues +-1/2.
//   * single-particle basis is (up, down) along +z,
//   * two-particle basis order is (uu, ud, du, dd),
//   * eigenspinors carry a fixed global phase: the first nonzero
//     component is real and positive.
// All types are immutable value types; every operation is pure.

namespace csb {

using cplx = std::complex<double>;

enum class Sign { plus, minus };

inline double sign_value(Sign s) { return s == Sign::plus ? +0.5 : -0.5; }
inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

// Unit 3-vector selecting a spin component or measurement axis.
class Direction {
  public:
    // Normalizes on construction; rejects vectors with |v| < 1e-12.
    Direction(double nx, double ny, double nz);

    // Polar angle from +z and azimuth from +x, both in radians.
    static Direction from_polar(double theta, double phi);

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    Direction operator-() const;

    double dot(const Direction& o) const { return x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

    // Angle to another direction, in [0, pi].
    double angle_to(const Direction& o) const;

    static Direction x_axis() { return Direction(1, 0, 0); }
    static Direction y_axis() { return Direction(0, 1, 0); }
    static Direction z_axis() { return Direction(0, 0, 1); }

  private:
    double x_, y_, z_;
};

// Two complex amplitudes in the z basis. Not forced to unit norm;
// operations that require normalization say so.
struct Spinor {
    cplx up{0.0, 0.0};
    cplx dn{0.0, 0.0};

    double norm_sq() const { return std::norm(up) + std::norm(dn); }
    double norm() const;
    Spinor normalized() const;
    Spinor scaled(cplx factor) const { return {factor * up, factor * dn}; }
};

// <bra|ket>, conjugate-linear in the bra.
cplx inner(const Spinor& bra, const Spinor& ket);

// Hermitian 2x2 operator, units of hbar.
struct SpinOp {
    // Row-major entries.
    cplx m00, m01, m10, m11;

    Spinor apply(const Spinor& s) const {
        return {m00 * s.up + m01 * s.dn, m10 * s.up + m11 * s.dn};
    }
    cplx trace() const { return m00 + m11; }
};

// S_n = (n_x sigma_x + n_y sigma_y + n_z sigma_z) / 2; eigenvalues +-1/2.
SpinOp spin_operator(const Direction& n);

// Normalized eigenspinor of spin_operator(n) with eigenvalue sign_value(sign).
// Deterministic: closed-form half-angle construction plus the global phase
// convention, so repeated calls are bit-identical.
Spinor eigenspinor(const Direction& n, Sign sign);

// Rescales so the first component with |a| > 0 becomes real positive.
Spinor fix_phase(const Spinor& s);

// Two spin-1/2 particles; amplitudes indexed (uu, ud, du, dd) where the
// first letter is particle 1.
struct MultiSpinState {
    std::array<cplx, 4> amp{};

    double norm_sq() const;
    double norm() const;
    MultiSpinState normalized() const;
};

// |p1> (x) |p2>.
MultiSpinState tensor(const Spinor& p1, const Spinor& p2);

// op (x) 1 for particle = 1, 1 (x) op for particle = 2.
MultiSpinState apply_on_particle(const SpinOp& op, int particle, const MultiSpinState& s);

// <bra|ket> in the product basis, conjugate-linear in the bra.
cplx inner2(const MultiSpinState& bra, const MultiSpinState& ket);

// (|ud> - |du>)/sqrt(2): total spin zero, anticorrelated along every axis.
MultiSpinState singlet();

}  // namespace csb
