#include "csb/spin_geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

namespace csb {

namespace {

constexpr double kPi = std::numbers::pi;

// Outcome -1/2 along n is the same boundary condition as +1/2 along -n.
Direction effective_axis(const Direction& axis, Sign outcome) {
    return outcome == Sign::plus ? axis : -axis;
}

TwoStateContext guarded_context(const Direction& i_eff, const Direction& f_eff,
                                double guard_deg) {
    const double omega = i_eff.angle_to(f_eff);
    const double guard = guard_deg * kPi / 180.0;
    if (omega > kPi - guard) {
        throw AntiparallelAxes("axes subtend " + std::to_string(omega * 180.0 / kPi) +
                               " deg; guard is " + std::to_string(180.0 - guard_deg) + " deg");
    }
    return TwoStateContext::make(eigenspinor(i_eff, Sign::plus), eigenspinor(f_eff, Sign::plus));
}

SpinVectorReport report_from_vector(const std::array<double, 3>& v, const Direction& i_eff,
                                    const Direction& f_eff) {
    const double mag = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const Direction dir(v[0], v[1], v[2]);
    return {v, dir, mag, i_eff.angle_to(f_eff), std::abs(dir.dot(i_eff) - dir.dot(f_eff))};
}

}  // namespace

SpinVectorReport hidden_spin_vector(const Direction& i_axis, const Direction& f_axis,
                                    Sign outcome_i, Sign outcome_f, double guard_deg) {
    const Direction i_eff = effective_axis(i_axis, outcome_i);
    const Direction f_eff = effective_axis(f_axis, outcome_f);
    const TwoStateContext ctx = guarded_context(i_eff, f_eff, guard_deg);
    const std::array<double, 3> v = {weak_spin_value(ctx, Direction::x_axis()),
                                     weak_spin_value(ctx, Direction::y_axis()),
                                     weak_spin_value(ctx, Direction::z_axis())};
    return report_from_vector(v, i_eff, f_eff);
}

SpinVectorReport hidden_spin_vector_sweep(const Direction& i_axis, const Direction& f_axis,
                                          int n_polar, int n_azimuth, int refine_iters,
                                          double guard_deg) {
    const Direction i_eff = effective_axis(i_axis, Sign::plus);
    const Direction f_eff = effective_axis(f_axis, Sign::plus);
    const TwoStateContext ctx = guarded_context(i_eff, f_eff, guard_deg);

    auto value_at = [&](double theta, double phi) {
        return weak_spin_value(ctx, Direction::from_polar(theta, phi));
    };

    // Coarse sweep over the whole sphere. Ties resolved by smaller
    // (theta, phi) so the scan order never matters.
    double best_theta = 0.0, best_phi = 0.0;
    double best = value_at(0.0, 0.0);
    for (int ip = 0; ip <= n_polar; ++ip) {
        const double theta = kPi * ip / n_polar;
        for (int ia = 0; ia < n_azimuth; ++ia) {
            const double phi = 2.0 * kPi * ia / n_azimuth;
            const double val = value_at(theta, phi);
            if (val > best ||
                (val == best && std::tie(theta, phi) < std::tie(best_theta, best_phi))) {
                best = val;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    // Local refinement: shrink a (theta, phi) window around the incumbent.
    double half_theta = kPi / n_polar;
    double half_phi = 2.0 * kPi / n_azimuth;
    const int local = 8;
    for (int it = 0; it < refine_iters; ++it) {
        double wt = best_theta, wp = best_phi, wv = best;
        for (int ip = -local; ip <= local; ++ip) {
            for (int ia = -local; ia <= local; ++ia) {
                const double theta = best_theta + half_theta * ip / local;
                const double phi = best_phi + half_phi * ia / local;
                if (theta < 0.0 || theta > kPi) continue;
                const double val = value_at(theta, phi);
                if (val > wv) {
                    wv = val;
                    wt = theta;
                    wp = phi;
                }
            }
        }
        best = wv;
        best_theta = wt;
        best_phi = wp;
        half_theta /= local / 2;
        half_phi /= local / 2;
    }

    const Direction dir = Direction::from_polar(best_theta, best_phi);
    const std::array<double, 3> v = {best * dir.x(), best * dir.y(), best * dir.z()};
    return report_from_vector(v, i_eff, f_eff);
}

std::vector<std::pair<Direction, double>> component_map(const Direction& i_axis,
                                                        const Direction& f_axis,
                                                        const std::vector<Direction>& probes,
                                                        Sign outcome_i, Sign outcome_f,
                                                        double guard_deg) {
    const Direction i_eff = effective_axis(i_axis, outcome_i);
    const Direction f_eff = effective_axis(f_axis, outcome_f);
    const TwoStateContext ctx = guarded_context(i_eff, f_eff, guard_deg);
    std::vector<std::pair<Direction, double>> out;
    out.reserve(probes.size());
    for (const Direction& d : probes) {
        out.emplace_back(d, weak_spin_value(ctx, d));
    }
    return out;
}

}  // namespace csb
