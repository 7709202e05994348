#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "csb/rng.hpp"
#include "csb/spin_geometry.hpp"
#include "oracles.hpp"

using namespace csb;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Direction random_direction(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Direction(s * std::cos(phi), s * std::sin(phi), z);
}

}  // namespace

TEST_CASE("degenerate case: equal axes give the axis itself at 1/2") {
    const auto rep = hidden_spin_vector(Direction::z_axis(), Direction::z_axis());
    CHECK(std::abs(rep.vector[0]) < 1e-14);
    CHECK(std::abs(rep.vector[1]) < 1e-14);
    CHECK(rep.vector[2] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(rep.max_value == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(rep.omega == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("magnitude and bisection across the omega ladder") {
    for (double omega_deg : {10.0, 30.0, 60.0, 90.0, 120.0, 150.0}) {
        const double omega = omega_deg * kDeg;
        const Direction i_axis = Direction::z_axis();
        const Direction f_axis = Direction::from_polar(omega, 0.0);
        const auto rep = hidden_spin_vector(i_axis, f_axis);

        CHECK(std::abs(rep.max_value - 0.5 / std::cos(0.5 * omega)) < 1e-9);
        CHECK(rep.omega == doctest::Approx(omega).epsilon(1e-12));

        const Direction bisector = Direction::from_polar(0.5 * omega, 0.0);
        CHECK(rep.max_direction.angle_to(bisector) < 1e-6);
        CHECK(rep.midplane_residual < 1e-10);

        // Component along either measured axis recovers 1/2 exactly.
        const double vi = rep.vector[0] * i_axis.x() + rep.vector[1] * i_axis.y() +
                          rep.vector[2] * i_axis.z();
        const double vf = rep.vector[0] * f_axis.x() + rep.vector[1] * f_axis.y() +
                          rep.vector[2] * f_axis.z();
        CHECK(std::abs(vi - 0.5) < 1e-10);
        CHECK(std::abs(vf - 0.5) < 1e-10);
    }
}

TEST_CASE("sweep search agrees with the algebraic extraction") {
    for (double omega_deg : {30.0, 90.0, 140.0}) {
        const Direction i_axis = Direction::z_axis();
        const Direction f_axis = Direction::from_polar(omega_deg * kDeg, 0.7);
        const auto algebraic = hidden_spin_vector(i_axis, f_axis);
        const auto swept = hidden_spin_vector_sweep(i_axis, f_axis);
        CHECK(std::abs(swept.max_value - algebraic.max_value) < 1e-9);
        CHECK(swept.max_direction.angle_to(algebraic.max_direction) < 1e-6);
    }
}

TEST_CASE("cos-theta law over 500 random probe directions") {
    Rng rng(808);
    const Direction i_axis = Direction::z_axis();
    const Direction f_axis = Direction::from_polar(90.0 * kDeg, 0.0);
    const auto rep = hidden_spin_vector(i_axis, f_axis);

    std::vector<Direction> probes;
    for (int it = 0; it < 500; ++it) probes.push_back(random_direction(rng));
    const auto values = component_map(i_axis, f_axis, probes);
    for (const auto& [d, v] : values) {
        const double cos_theta = d.dot(rep.max_direction);
        CHECK(std::abs(v - rep.max_value * cos_theta) < 1e-10);
    }
}

TEST_CASE("component_map named probes") {
    const Direction i_axis = Direction::z_axis();
    const Direction f_axis = Direction::from_polar(90.0 * kDeg, 0.0);
    const auto rep = hidden_spin_vector(i_axis, f_axis);

    // Orthogonal to the spin vector: zero component. The bisector is at
    // 45 deg in the xz plane, so (1,0,-1)/sqrt2 and y are both orthogonal.
    const Direction ortho1(1.0, 0.0, -1.0);
    const Direction ortho2 = Direction::y_axis();
    // 60 deg from the maximum direction, in plane.
    const Direction at60 = Direction::from_polar((45.0 + 60.0) * kDeg, 0.0);
    const auto values =
        component_map(i_axis, f_axis, {ortho1, ortho2, at60, i_axis, f_axis});
    CHECK(std::abs(values[0].second) < 1e-12);
    CHECK(std::abs(values[1].second) < 1e-12);
    CHECK(values[2].second == doctest::Approx(rep.max_value * 0.5).epsilon(1e-10));
    CHECK(values[3].second == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(values[4].second == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("rotation covariance: rotating both axes rotates the vector") {
    Rng rng(31337);
    for (int it = 0; it < 20; ++it) {
        const Direction i_axis = random_direction(rng);
        Direction f_axis = random_direction(rng);
        while (i_axis.angle_to(f_axis) > 175.0 * kDeg) f_axis = random_direction(rng);

        const std::array<double, 3> axis = {rng.normal(), rng.normal(), rng.normal()};
        const double axis_norm =
            std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
        const std::array<double, 3> u = {axis[0] / axis_norm, axis[1] / axis_norm,
                                         axis[2] / axis_norm};
        const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);

        const auto base = hidden_spin_vector(i_axis, f_axis);
        const auto ri = oracle::rotate({i_axis.x(), i_axis.y(), i_axis.z()}, u, ang);
        const auto rf = oracle::rotate({f_axis.x(), f_axis.y(), f_axis.z()}, u, ang);
        const auto rotated = hidden_spin_vector(Direction(ri[0], ri[1], ri[2]),
                                                Direction(rf[0], rf[1], rf[2]));
        const auto rv = oracle::rotate(base.vector, u, ang);
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(rotated.vector[c] - rv[c]) < 1e-10);
        }
    }
}

TEST_CASE("consistency with the two-boundary value on 500 random directions") {
    Rng rng(222);
    const Direction i_axis(0.3, 0.2, 0.9);
    const Direction f_axis(-0.5, 0.4, 0.76);
    const auto rep = hidden_spin_vector(i_axis, f_axis);
    const auto ctx = TwoStateContext::make(eigenspinor(i_axis, Sign::plus),
                                           eigenspinor(f_axis, Sign::plus));
    for (int it = 0; it < 500; ++it) {
        const Direction h = random_direction(rng);
        const double via_vector =
            rep.vector[0] * h.x() + rep.vector[1] * h.y() + rep.vector[2] * h.z();
        CHECK(std::abs(via_vector - weak_spin_value(ctx, h)) < 1e-10);
    }
}

TEST_CASE("minus outcomes flip the effective axes") {
    const Direction i_axis = Direction::z_axis();
    const Direction f_axis = Direction::from_polar(60.0 * kDeg, 0.0);
    const auto flipped = hidden_spin_vector(i_axis, f_axis, Sign::minus, Sign::plus);
    const auto direct = hidden_spin_vector(-i_axis, f_axis, Sign::plus, Sign::plus);
    for (int c = 0; c < 3; ++c) {
        CHECK(flipped.vector[c] == doctest::Approx(direct.vector[c]).epsilon(1e-13));
    }
}

TEST_CASE("antiparallel guard") {
    const Direction z = Direction::z_axis();
    CHECK_THROWS_AS(hidden_spin_vector(z, Direction::from_polar(179.8 * kDeg, 0.0)),
                    AntiparallelAxes);
    // Just inside the default guard must work.
    CHECK_NOTHROW(hidden_spin_vector(z, Direction::from_polar(178.5 * kDeg, 0.0)));
    // Outcome flips can also push the axes antiparallel.
    CHECK_THROWS_AS(hidden_spin_vector(z, z, Sign::plus, Sign::minus), AntiparallelAxes);
}
