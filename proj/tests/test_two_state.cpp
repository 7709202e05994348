#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "csb/rng.hpp"
#include "csb/two_state.hpp"
#include "oracles.hpp"

using namespace csb;

namespace {

Direction random_direction(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Direction(s * std::cos(phi), s * std::sin(phi), z);
}

MultiSpinState random_state(Rng& rng) {
    MultiSpinState s;
    for (auto& a : s.amp) a = cplx(rng.normal(), rng.normal());
    return s.normalized();
}

cplx oracle_weak(const Spinor& pre, const Spinor& post, const Direction& h) {
    const oracle::C i[2] = {pre.up, pre.dn};
    const oracle::C f[2] = {post.up, post.dn};
    return oracle::weak_value_ref(i, f, h.x(), h.y(), h.z());
}

}  // namespace

TEST_CASE("weak value: eigenstate boundary gives the eigenvalue") {
    const Spinor zp = eigenspinor(Direction::z_axis(), Sign::plus);
    const auto ctx = TwoStateContext::make(zp, zp);
    CHECK(weak_spin_value(ctx, Direction::z_axis()) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("weak value: z pre-selection, x post-selection") {
    const Spinor pre = eigenspinor(Direction::z_axis(), Sign::plus);
    const Spinor post = eigenspinor(Direction::x_axis(), Sign::plus);
    const auto ctx = TwoStateContext::make(pre, post);

    const Direction h45(1.0, 0.0, 1.0);
    const double v = weak_spin_value(ctx, h45);
    CHECK(v == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(v == doctest::Approx(oracle_weak(pre, post, h45).real()).epsilon(1e-13));

    // h = y: the full value is i/2, so the real part vanishes.
    const cplx wy = weak_spin_value_complex(ctx, Direction::y_axis());
    CHECK(std::abs(wy - cplx(0.0, 0.5)) < 1e-14);
    CHECK(std::abs(weak_spin_value(ctx, Direction::y_axis())) < 1e-14);

    const cplx wz = weak_spin_value_complex(ctx, Direction::z_axis());
    CHECK(std::abs(wz - cplx(0.5, 0.0)) < 1e-14);
}

TEST_CASE("weak value matches the explicit-matrix oracle on random inputs") {
    Rng rng(1234);
    for (int it = 0; it < 500; ++it) {
        const Spinor pre{cplx(rng.normal(), rng.normal()), cplx(rng.normal(), rng.normal())};
        const Spinor post{cplx(rng.normal(), rng.normal()), cplx(rng.normal(), rng.normal())};
        if (std::abs(inner(post, pre)) < 1e-3) continue;
        const Direction h = random_direction(rng);
        const auto ctx = TwoStateContext::make(pre, post);
        const cplx mine = weak_spin_value_complex(ctx, h);
        const cplx ref = oracle_weak(pre, post, h);
        CHECK(std::abs(mine - ref) < 1e-11 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("weak value refuses orthogonal boundary conditions") {
    const Spinor zp = eigenspinor(Direction::z_axis(), Sign::plus);
    const Spinor zm = eigenspinor(Direction::z_axis(), Sign::minus);
    CHECK_THROWS_AS(TwoStateContext::make(zp, zm), ZeroOverlap);
}

TEST_CASE("weak value is invariant under global phases of either boundary") {
    const Spinor pre = eigenspinor(Direction(0.2, 0.5, 0.8), Sign::plus);
    const Spinor post = eigenspinor(Direction(-0.4, 0.1, 0.9), Sign::plus);
    const Direction h(0.3, -0.7, 0.2);
    const double base = weak_spin_value(TwoStateContext::make(pre, post), h);
    for (int k = 0; k < 16; ++k) {
        const double alpha = 2.0 * std::numbers::pi * k / 16.0;
        const cplx ph(std::cos(alpha), std::sin(alpha));
        const double va = weak_spin_value(TwoStateContext::make(pre.scaled(ph), post), h);
        const double vb = weak_spin_value(TwoStateContext::make(pre, post.scaled(ph)), h);
        CHECK(std::abs(va - base) < 1e-12);
        CHECK(std::abs(vb - base) < 1e-12);
    }
}

TEST_CASE("weak value is linear in the probed direction") {
    Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        const Direction ia = random_direction(rng);
        const Direction fa = random_direction(rng);
        const Spinor pre = eigenspinor(ia, Sign::plus);
        const Spinor post = eigenspinor(fa, Sign::plus);
        if (std::abs(inner(post, pre)) < 1e-2) continue;
        const auto ctx = TwoStateContext::make(pre, post);
        const double vx = weak_spin_value(ctx, Direction::x_axis());
        const double vy = weak_spin_value(ctx, Direction::y_axis());
        const double vz = weak_spin_value(ctx, Direction::z_axis());
        for (int it = 0; it < 100; ++it) {
            const Direction h = random_direction(rng);
            const double predicted = vx * h.x() + vy * h.y() + vz * h.z();
            CHECK(std::abs(weak_spin_value(ctx, h) - predicted) < 1e-10);
        }
    }
}

TEST_CASE("born_joint on the singlet") {
    const MultiSpinState s = singlet();
    const Direction z = Direction::z_axis();
    CHECK(born_joint(s, z, z, Sign::plus, Sign::plus) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::abs(born_joint(s, z, z, Sign::plus, Sign::minus) - 0.5) < 1e-14);

    // Second axis at 60 degrees to z: P(+,+) = sin^2(30 deg)/2 = 0.125.
    const Direction f60 = Direction::from_polar(60.0 * std::numbers::pi / 180.0, 0.0);
    CHECK(born_joint(s, z, f60, Sign::plus, Sign::plus) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("born_joint outcomes sum to one for random states and axes") {
    Rng rng(2024);
    for (int it = 0; it < 200; ++it) {
        const MultiSpinState I = random_state(rng);
        const Direction e = random_direction(rng);
        const Direction f = random_direction(rng);
        double total = 0.0;
        for (Sign m : {Sign::plus, Sign::minus}) {
            for (Sign n : {Sign::plus, Sign::minus}) {
                total += born_joint(I, e, f, m, n);
            }
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("conditional_state on the singlet and on product states") {
    const MultiSpinState s = singlet();

    const Spinor c1 = conditional_state(s, Direction::z_axis(), Sign::plus);
    const Spinor zm = eigenspinor(Direction::z_axis(), Sign::minus);
    CHECK(std::abs(std::abs(inner(zm, c1)) - 1.0) < 1e-12);

    const Spinor c2 = conditional_state(s, Direction::x_axis(), Sign::plus);
    const Spinor xm = eigenspinor(Direction::x_axis(), Sign::minus);
    CHECK(std::abs(std::abs(inner(xm, c2)) - 1.0) < 1e-12);

    // No entanglement: conditioning is inert.
    const Spinor xp = eigenspinor(Direction::x_axis(), Sign::plus);
    const MultiSpinState prod = tensor(eigenspinor(Direction::z_axis(), Sign::plus), xp);
    const Spinor c3 = conditional_state(prod, Direction(1, 1, 0), Sign::plus);
    CHECK(std::abs(std::abs(inner(xp, c3)) - 1.0) < 1e-12);

    // Conditioning on the empty branch of a product state.
    CHECK_THROWS_AS(conditional_state(prod, Direction::z_axis(), Sign::minus), ZeroBranch);
}

TEST_CASE("conditional_state is independent of how particle 2 is expanded") {
    // Eq-(16)-style consistency: P(n | m) from the joint Born weights must
    // equal |<f_n|conditional>|^2 for any f axis.
    Rng rng(555);
    for (int it = 0; it < 200; ++it) {
        const MultiSpinState I = random_state(rng);
        const Direction e = random_direction(rng);
        const Direction f = random_direction(rng);
        for (Sign m : {Sign::plus, Sign::minus}) {
            const double pm = born_joint(I, e, f, m, Sign::plus);
            const double pmm = born_joint(I, e, f, m, Sign::minus);
            if (pm + pmm < 1e-8) continue;
            const Spinor cond = conditional_state(I, e, m);
            const double lhs = pm / (pm + pmm);
            const double rhs = std::norm(inner(eigenspinor(f, Sign::plus), cond));
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("entangled weak value: singlet with both axes z") {
    const auto ctx = EntangledContext::make(singlet(), Direction::z_axis(), Direction::z_axis(),
                                            Sign::plus, Sign::minus);
    CHECK(entangled_weak_value(ctx, Direction::z_axis()) ==
          doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("entangled weak value: product state reduces to a single-particle value") {
    const Spinor zp = eigenspinor(Direction::z_axis(), Sign::plus);
    const MultiSpinState prod = tensor(zp, zp);
    for (double theta_deg : {0.0, 20.0, 45.0, 77.0, 120.0}) {
        const double theta = theta_deg * std::numbers::pi / 180.0;
        const Direction h = Direction::from_polar(theta, 0.0);
        const auto ctx = EntangledContext::make(prod, Direction::z_axis(), Direction::z_axis(),
                                                Sign::plus, Sign::plus);
        CHECK(entangled_weak_value(ctx, h) ==
              doctest::Approx(0.5 * std::cos(theta)).epsilon(1e-12));
    }
}

TEST_CASE("reduction identity on named examples") {
    const Direction z = Direction::z_axis();
    const Direction x = Direction::x_axis();

    // Singlet, e = z(+), f = x(+), h midway between -z and +x: equals the
    // single-particle value with pre |-z>, post |+x>.
    const Direction h_mid(1.0, 0.0, -1.0);
    const auto ctx = EntangledContext::make(singlet(), z, x, Sign::plus, Sign::plus);
    const double ent = entangled_weak_value(ctx, h_mid);
    const double red = reduced_weak_value(ctx, h_mid);
    CHECK(std::abs(ent - red) < 1e-12);
    const auto single = TwoStateContext::make(eigenspinor(z, Sign::minus),
                                              eigenspinor(x, Sign::plus));
    CHECK(std::abs(ent - weak_spin_value(single, h_mid)) < 1e-12);

    // Singlet, e = f = z, (+,-), h = x.
    const auto ctx2 = EntangledContext::make(singlet(), z, z, Sign::plus, Sign::minus);
    CHECK(std::abs(entangled_weak_value(ctx2, x) - reduced_weak_value(ctx2, x)) < 1e-12);

    // Product state |+z> (x) |+z>, h tilted in the xz plane.
    const Spinor zp = eigenspinor(z, Sign::plus);
    const auto ctx3 = EntangledContext::make(tensor(zp, zp), z, z, Sign::plus, Sign::plus);
    const Direction h_tilt = Direction::from_polar(0.4, 0.0);
    CHECK(std::abs(entangled_weak_value(ctx3, h_tilt) - reduced_weak_value(ctx3, h_tilt)) <
          1e-12);
}

TEST_CASE("reduction identity holds for 1000 random configurations") {
    Rng rng(424242);
    int done = 0;
    while (done < 1000) {
        const MultiSpinState I = random_state(rng);
        const Direction e = random_direction(rng);
        const Direction f = random_direction(rng);
        const Sign m = rng.uniform() < 0.5 ? Sign::plus : Sign::minus;
        const Sign n = rng.uniform() < 0.5 ? Sign::plus : Sign::minus;
        const MultiSpinState bra = tensor(eigenspinor(e, m), eigenspinor(f, n));
        if (std::abs(inner2(bra, I)) <= 1e-6) continue;
        const Direction h = random_direction(rng);
        const auto ctx = EntangledContext::make(I, e, f, m, n, 1e-6);
        CHECK(std::abs(entangled_weak_value(ctx, h) - reduced_weak_value(ctx, h)) < 1e-10);
        ++done;
    }
    CHECK(done == 1000);
}

TEST_CASE("entangled context refuses vanishing joint overlap") {
    // Singlet with equal axes and equal outcomes never happens.
    CHECK_THROWS_AS(EntangledContext::make(singlet(), Direction::z_axis(), Direction::z_axis(),
                                           Sign::plus, Sign::plus),
                    ZeroOverlap);
}
