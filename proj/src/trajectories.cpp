#include "csb/trajectories.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace csb {

namespace {

// Bilinear lookup shared by rho_at / cur_at.
double field_at(const FlowField& f, const std::vector<std::vector<double>>& field, double t,
                double x) {
    if (!f.x_in_range(x)) {
        throw GridExit("field lookup at x = " + std::to_string(x) + " outside grid span");
    }
    const double dx = f.grid.dx();
    double u = (x - f.grid.x_min) / dx;
    int jx = static_cast<int>(u);
    jx = std::clamp(jx, 0, f.grid.n_points - 2);
    const double fx = u - jx;

    // Time queries are clamped to the stored span: integrators may poke
    // just past a boundary during the step that triggers termination.
    const double vmax = static_cast<double>(f.n_slices() - 1);
    double v = std::clamp((t - f.t0) / f.dt, 0.0, vmax);
    int jt = static_cast<int>(v);
    jt = std::clamp(jt, 0, f.n_slices() - 2);
    const double ft = v - jt;

    const double a = field[jt][jx] * (1 - fx) + field[jt][jx + 1] * fx;
    const double b = field[jt + 1][jx] * (1 - fx) + field[jt + 1][jx + 1] * fx;
    return a * (1 - ft) + b * ft;
}

// Cash-Karp embedded Runge-Kutta 4(5) step for a small fixed-size state.
template <int N, class F>
void rk45_step(const F& f, double t, const std::array<double, N>& y, double h,
               std::array<double, N>& y_out, std::array<double, N>& err) {
    static constexpr double b21 = 1.0 / 5.0;
    static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    static constexpr double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
    static constexpr double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0,
                            b54 = 35.0 / 27.0;
    static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
                            b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;
    static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                            c6 = 512.0 / 1771.0;
    static constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                            d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                            d6 = c6 - 1.0 / 4.0;

    std::array<double, N> k1 = f(t, y), tmp;
    for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * b21 * k1[i];
    std::array<double, N> k2 = f(t + h / 5.0, tmp);
    for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    std::array<double, N> k3 = f(t + 3.0 * h / 10.0, tmp);
    for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    std::array<double, N> k4 = f(t + 3.0 * h / 5.0, tmp);
    for (int i = 0; i < N; ++i) {
        tmp[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    }
    std::array<double, N> k5 = f(t + h, tmp);
    for (int i = 0; i < N; ++i) {
        tmp[i] = y[i] +
                 h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] + b65 * k5[i]);
    }
    std::array<double, N> k6 = f(t + 7.0 * h / 8.0, tmp);

    for (int i = 0; i < N; ++i) {
        y_out[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
        err[i] = h * (d1 * k1[i] + d3 * k3[i] + d5 * k5[i] + d4 * k4[i] + d6 * k6[i]);
    }
}

template <int N>
double error_ratio(const std::array<double, N>& err, const std::array<double, N>& y,
                   const std::array<double, N>& y_new, double rtol, double atol) {
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

}  // namespace

double FlowField::rho_at(double t, double x) const { return field_at(*this, rho, t, x); }
double FlowField::cur_at(double t, double x) const { return field_at(*this, cur, t, x); }

bool FlowField::x_in_range(double x) const {
    return x >= grid.x_min && x <= grid.x_min + (grid.n_points - 1) * grid.dx();
}

FlowField standard_flow(const EvolutionHistory& hist) {
    FlowField f;
    f.grid = hist.grid();
    f.t0 = hist.t_begin();
    f.dt = hist.dt;
    f.rho.reserve(hist.slices.size());
    f.cur.reserve(hist.slices.size());
    for (const auto& slice : hist.slices) {
        FieldPair fp = current_standard(slice);
        for (double r : fp.density) f.max_abs_rho = std::max(f.max_abs_rho, std::abs(r));
        f.rho.push_back(std::move(fp.density));
        f.cur.push_back(std::move(fp.current));
    }
    return f;
}

FlowField cs_flow(const EvolutionHistory& forward, const EvolutionHistory& backward,
                  double eps_overlap) {
    if (forward.n_slices() != backward.n_slices()) {
        throw std::invalid_argument("cs_flow: histories have different slice counts");
    }
    FlowField f;
    f.grid = forward.grid();
    f.t0 = forward.t_begin();
    f.dt = forward.dt;
    for (int s = 0; s < forward.n_slices(); ++s) {
        FieldPair fp = current_cs(forward.slices[s], backward.slices[s], eps_overlap);
        for (double r : fp.density) f.max_abs_rho = std::max(f.max_abs_rho, std::abs(r));
        f.rho.push_back(std::move(fp.density));
        f.cur.push_back(std::move(fp.current));
    }
    return f;
}

double Trajectory::x_at_time(double t) const {
    if (samples.empty()) throw std::logic_error("empty trajectory");
    if (t <= samples.front().first) return samples.front().second;
    if (t >= samples.back().first) return samples.back().second;
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const auto& s, double tt) { return s.first < tt; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.first) / (hi.first - lo.first);
    return lo.second * (1 - f) + hi.second * f;
}

Trajectory bohm_trajectory(const FlowField& flow, double x0, const IntegratorOptions& opts) {
    const double eps_density = opts.eps_density_rel * flow.max_abs_rho;
    auto velocity = [&](double t, const std::array<double, 1>& y) -> std::array<double, 1> {
        const double rho = flow.rho_at(t, y[0]);
        if (rho < eps_density) {
            throw NodeEncounter("bohm_trajectory: density " + std::to_string(rho) +
                                " below floor at t = " + std::to_string(t) +
                                ", x = " + std::to_string(y[0]));
        }
        return {flow.cur_at(t, y[0]) / rho};
    };

    // Seed check uses the same floor.
    if (flow.rho_at(flow.t0, x0) < eps_density) {
        throw NodeEncounter("bohm_trajectory: seed density below floor");
    }

    Trajectory traj;
    traj.x0 = x0;
    traj.t0 = flow.t0;
    traj.samples.reserve(flow.n_slices());
    traj.samples.emplace_back(flow.t0, x0);

    std::array<double, 1> y{x0};
    long steps_used = 0;
    for (int s = 0; s + 1 < flow.n_slices(); ++s) {
        double t = flow.slice_time(s);
        const double t_target = flow.slice_time(s + 1);
        double h = flow.dt;
        while (t < t_target) {
            // Snap when the remainder is below roundoff so t += h cannot stall.
            if (t_target - t <= 4e-16 * std::max(1.0, std::abs(t_target))) {
                t = t_target;
                break;
            }
            h = std::min(h, t_target - t);
            std::array<double, 1> y_new, err;
            rk45_step<1>(velocity, t, y, h, y_new, err);
            const double ratio = error_ratio<1>(err, y, y_new, opts.rtol, opts.atol);
            if (ratio <= 1.0) {
                t += h;
                y = y_new;
                h *= std::clamp(0.9 * std::pow(std::max(ratio, 1e-12), -0.2), 1.0, 5.0);
            } else {
                h *= std::max(0.9 * std::pow(ratio, -0.25), 0.1);
            }
            if (++steps_used > opts.max_steps) {
                throw Error("bohm_trajectory: step limit exceeded");
            }
        }
        traj.samples.emplace_back(t_target, y[0]);
    }
    return traj;
}

double WorldLine::x_at_time(double t) const {
    if (samples.size() < 2) throw std::logic_error("worldline too short");
    const bool increasing = samples.back().t > samples.front().t;
    double prev = samples.front().t;
    for (size_t i = 1; i < samples.size(); ++i) {
        const double cur = samples[i].t;
        if (increasing ? cur < prev : cur > prev) {
            throw std::logic_error("worldline t is not monotone; x(t) undefined");
        }
        prev = cur;
    }
    auto lerp = [](const WorldLineSample& a, const WorldLineSample& b, double tt) {
        if (a.t == b.t) return a.x;
        const double f = (tt - a.t) / (b.t - a.t);
        return a.x * (1 - f) + b.x * f;
    };
    for (size_t i = 1; i < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& b = samples[i];
        if ((increasing && t >= a.t && t <= b.t) || (!increasing && t <= a.t && t >= b.t)) {
            return lerp(a, b, t);
        }
    }
    throw std::logic_error("requested time outside worldline span");
}

WorldLine cs_worldline(const FlowField& flow, double x0, double t0,
                       const WorldLineOptions& opts) {
    const double eps_density = opts.integ.eps_density_rel * flow.max_abs_rho;
    const double t_lo = flow.t0;
    const double t_hi = flow.t_end();
    if (t0 < t_lo || t0 > t_hi) {
        throw std::invalid_argument("cs_worldline: t0 outside history span");
    }
    if (std::abs(flow.rho_at(t0, x0)) < eps_density) {
        throw NodeEncounter("cs_worldline: |j0| at seed below floor");
    }

    auto rhs = [&](double /*lambda*/, const std::array<double, 2>& y) -> std::array<double, 2> {
        return {flow.rho_at(y[0], y[1]), flow.cur_at(y[0], y[1])};
    };

    WorldLine wl;
    double lambda = 0.0;
    std::array<double, 2> y{t0, x0};  // (t, x)
    wl.samples.push_back({lambda, y[0], y[1]});

    size_t next_record = 0;
    while (next_record < opts.record_times.size() &&
           opts.record_times[next_record] <= t0) {
        ++next_record;
    }

    // Initial lambda scale: a step should advance t by about half a slice.
    const double j0_seed = flow.rho_at(t0, x0);
    double h = 0.5 * flow.dt / std::max(std::abs(j0_seed), eps_density);
    const double span_scale = std::max(t_hi - t_lo, flow.grid.length());
    double j0_prev = j0_seed;
    long steps_used = 0;

    auto record = [&](double lam, double tt, double xx) { wl.samples.push_back({lam, tt, xx}); };

    // Locates the zero of j0 on the straight segment between two states.
    auto locate_reversal = [&](const std::array<double, 2>& a, const std::array<double, 2>& b,
                               double la, double lb) {
        double sa = flow.rho_at(a[0], a[1]);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double tm = a[0] + mid * (b[0] - a[0]);
            const double xm = a[1] + mid * (b[1] - a[1]);
            const double sm = flow.rho_at(tm, xm);
            if ((sa <= 0.0) == (sm <= 0.0)) {
                lo = mid;
                sa = sm;
            } else {
                hi = mid;
            }
        }
        const double mid = 0.5 * (lo + hi);
        wl.reversals.push_back({la + mid * (lb - la), a[0] + mid * (b[0] - a[0]),
                                a[1] + mid * (b[1] - a[1])});
    };

    while (true) {
        if (lambda >= opts.lambda_max) {
            wl.stop_reason = WorldLineStop::lambda_limit;
            break;
        }
        if (++steps_used > opts.integ.max_steps) {
            wl.stop_reason = WorldLineStop::step_limit;
            break;
        }

        std::array<double, 2> y_new, err;
        rk45_step<2>(rhs, lambda, y, h, y_new, err);
        // Scale both components against the spatial/temporal spans.
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double scale = opts.integ.atol * span_scale +
                                 opts.integ.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            worst = std::max(worst, std::abs(err[i]) / scale);
        }
        if (worst > 1.0) {
            h *= std::max(0.9 * std::pow(worst, -0.25), 0.1);
            if (h < 1e-300) {
                wl.stop_reason = WorldLineStop::stalled;
                break;
            }
            continue;
        }

        // Accepted. Handle exact-time recording by shrinking the step onto
        // the requested time with a bisection on the sub-step size.
        bool recorded_event = false;
        if (next_record < opts.record_times.size()) {
            const double t_rec = opts.record_times[next_record];
            const bool crossed = (y[0] < t_rec && y_new[0] >= t_rec) ||
                                 (y[0] > t_rec && y_new[0] <= t_rec);
            if (crossed) {
                double lo = 0.0, hi = h;
                std::array<double, 2> y_mid = y_new, e_mid;
                for (int it = 0; it < 80; ++it) {
                    const double hm = 0.5 * (lo + hi);
                    rk45_step<2>(rhs, lambda, y, hm, y_mid, e_mid);
                    const bool past = (y[0] < t_rec) ? (y_mid[0] >= t_rec) : (y_mid[0] <= t_rec);
                    if (past) {
                        hi = hm;
                    } else {
                        lo = hm;
                    }
                    if (hi - lo < 1e-15 * std::max(1.0, h)) break;
                }
                const double hm = 0.5 * (lo + hi);
                rk45_step<2>(rhs, lambda, y, hm, y_mid, e_mid);
                const double j0_here = flow.rho_at(y_mid[0], y_mid[1]);
                if ((j0_prev < 0.0) != (j0_here < 0.0)) {
                    locate_reversal(y, y_mid, lambda, lambda + hm);
                }
                lambda += hm;
                y = y_mid;
                y[0] = t_rec;  // pin the recorded sample to the exact time
                record(lambda, y[0], y[1]);
                j0_prev = j0_here;
                ++next_record;
                recorded_event = true;
            }
        }

        if (!recorded_event) {
            const double j0_here = flow.rho_at(y_new[0], y_new[1]);
            if ((j0_prev < 0.0) != (j0_here < 0.0)) {
                locate_reversal(y, y_new, lambda, lambda + h);
            }
            lambda += h;
            y = y_new;
            j0_prev = j0_here;
            record(lambda, y[0], y[1]);
            h *= std::clamp(0.9 * std::pow(std::max(worst, 1e-12), -0.2), 1.0, 5.0);
        }

        if (y[0] <= t_lo || y[0] >= t_hi) {
            wl.stop_reason = WorldLineStop::time_boundary;
            break;
        }
        const std::array<double, 2> speed = rhs(lambda, y);
        if (std::abs(speed[0]) < eps_density && std::abs(speed[1]) < eps_density) {
            wl.stop_reason = WorldLineStop::stalled;
            break;
        }
    }
    return wl;
}

FourVelocity four_velocity(double j0, double j1) {
    if (j0 == 0.0 && j1 == 0.0) {
        throw ZeroCurrent("four_velocity: both current components vanish");
    }
    const double s = j0 * j0 - j1 * j1;
    FourVelocity out;
    if (s > 0.0) {
        const double mag = std::sqrt(s);
        out.u0 = j0 / mag;
        out.u1 = j1 / mag;
        out.cls = CausalClass::timelike;
        out.rest_density = mag;
        out.normalized = true;
    } else {
        out.u0 = j0;
        out.u1 = j1;
        out.cls = (s == 0.0) ? CausalClass::lightlike : CausalClass::spacelike;
        out.rest_density = 0.0;
        out.normalized = false;
    }
    return out;
}

}  // namespace csb
