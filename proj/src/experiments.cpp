#include "csb/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "csb/ensemble.hpp"
#include "csb/json_writer.hpp"
#include "csb/rng.hpp"
#include "csb/spin_geometry.hpp"
#include "csb/trajectories.hpp"
#include "csb/two_state.hpp"
#include "csb/wavepacket.hpp"

namespace csb {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string fmt(double v) { return Resolver::format_number(v); }

struct ExperimentOutput {
    Json result = Json::object();
    bool pass = true;
    // name -> content, written under out_dir
    std::vector<std::pair<std::string, std::string>> files;
};

Json complex_json(const cplx& z) {
    Json j = Json::object();
    j.set("re", z.real());
    j.set("im", z.imag());
    return j;
}

Json direction_json(const Direction& d) {
    Json j = Json::object();
    j.set("x", d.x());
    j.set("y", d.y());
    j.set("z", d.z());
    return j;
}

Json spinor_json(const Spinor& s) {
    Json j = Json::array();
    j.push_back(s.up.real());
    j.push_back(s.up.imag());
    j.push_back(s.dn.real());
    j.push_back(s.dn.imag());
    return j;
}

Sign parse_sign(const std::string& raw, const std::string& key) {
    if (raw == "+") return Sign::plus;
    if (raw == "-") return Sign::minus;
    throw ConfigInvalid("key '" + key + "': expected + or -, got '" + raw + "'");
}

Direction resolve_direction(Resolver& r, const std::string& prefix) {
    const bool has_axis = r.present(prefix + ".axis");
    const bool has_polar = r.present(prefix + ".polar_deg") || r.present(prefix + ".azimuth_deg");
    if (has_axis && has_polar) {
        throw ConfigInvalid("'" + prefix + "': give either axis or polar/azimuth, not both");
    }
    if (has_polar) {
        const double theta = r.number_or(prefix + ".polar_deg", 0.0) * kDegToRad;
        const double phi = r.number_or(prefix + ".azimuth_deg", 0.0) * kDegToRad;
        return Direction::from_polar(theta, phi);
    }
    const std::vector<double> v = r.number_list(prefix + ".axis");
    if (v.size() != 3) {
        throw ConfigInvalid("'" + prefix + ".axis': expected 3 components, got " +
                            std::to_string(v.size()));
    }
    try {
        return Direction(v[0], v[1], v[2]);
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid("'" + prefix + ".axis': " + e.what());
    }
}

// Spinor from explicit amplitudes or from (axis, outcome) eigenspinor.
Spinor resolve_spinor(Resolver& r, const std::string& prefix) {
    if (r.present(prefix + ".amplitudes")) {
        const std::vector<double> v = r.number_list(prefix + ".amplitudes");
        if (v.size() != 4) {
            throw ConfigInvalid("'" + prefix + ".amplitudes': expected re,im,re,im (4 numbers)");
        }
        return Spinor{cplx(v[0], v[1]), cplx(v[2], v[3])};
    }
    const Direction axis = resolve_direction(r, prefix);
    const Sign outcome =
        parse_sign(r.token_or(prefix + ".outcome", "+"), prefix + ".outcome");
    return eigenspinor(axis, outcome);
}

Grid resolve_grid(Resolver& r) {
    const double x_min = r.number("grid.x_min");
    const double x_max = r.number("grid.x_max");
    const long long n = r.integer("grid.n_points");
    try {
        return Grid(x_min, x_max, static_cast<int>(n));
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(std::string("grid: ") + e.what());
    }
}

struct PacketParams {
    double center = 0.0;
    double sigma = 1.0;
    double momentum = 0.0;
    std::optional<Spinor> spin;
};

PacketParams resolve_packet(Resolver& r, const std::string& prefix) {
    PacketParams p;
    p.center = r.number_or(prefix + ".center", 0.0);
    p.sigma = r.number(prefix + ".sigma");
    if (p.sigma <= 0.0) {
        throw ConfigInvalid("'" + prefix + ".sigma' must be positive");
    }
    p.momentum = r.number_or(prefix + ".momentum", 0.0);
    if (r.present(prefix + ".spin.axis") || r.present(prefix + ".spin.amplitudes") ||
        r.present(prefix + ".spin.polar_deg")) {
        p.spin = resolve_spinor(r, prefix + ".spin");
    }
    return p;
}

std::vector<double> resolve_potential(Resolver& r, const Grid& grid) {
    const std::string kind = r.token_or("potential.kind", "none");
    if (kind == "none") return {};
    std::vector<double> v(grid.n_points);
    if (kind == "harmonic") {
        const double omega = r.number("potential.omega");
        const double center = r.number_or("potential.center", 0.0);
        for (int j = 0; j < grid.n_points; ++j) {
            const double d = grid.x(j) - center;
            v[j] = 0.5 * omega * omega * d * d;
        }
        return v;
    }
    if (kind == "barrier") {
        const double height = r.number("potential.height");
        const double width = r.number("potential.width");
        const double center = r.number_or("potential.center", 0.0);
        for (int j = 0; j < grid.n_points; ++j) {
            v[j] = std::abs(grid.x(j) - center) <= 0.5 * width ? height : 0.0;
        }
        return v;
    }
    throw ConfigInvalid("potential.kind: unknown kind '" + kind + "'");
}

MultiSpinState resolve_initial_state(Resolver& r) {
    const std::string kind = r.token_or("initial.kind", "singlet");
    if (kind == "singlet") return singlet();
    if (kind == "product") {
        const Spinor s1 = resolve_spinor(r, "initial.spin1");
        const Spinor s2 = resolve_spinor(r, "initial.spin2");
        return tensor(s1, s2);
    }
    if (kind == "amplitudes") {
        const std::vector<double> v = r.number_list("initial.amplitudes");
        if (v.size() != 8) {
            throw ConfigInvalid("initial.amplitudes: expected 8 numbers (re,im x 4, uu ud du dd)");
        }
        MultiSpinState s{{cplx(v[0], v[1]), cplx(v[2], v[3]), cplx(v[4], v[5]), cplx(v[6], v[7])}};
        const double n = s.norm();
        if (n == 0.0) throw ConfigInvalid("initial.amplitudes: zero state");
        return s.normalized();
    }
    throw ConfigInvalid("initial.kind: unknown kind '" + kind + "'");
}

Json snapshot_json(const GridWavefunction& psi) {
    Json j = Json::object();
    Json g = Json::object();
    g.set("x_min", psi.grid.x_min);
    g.set("x_max", psi.grid.x_max);
    g.set("n_points", static_cast<long long>(psi.grid.n_points));
    j.set("grid", std::move(g));
    j.set("time", psi.time);
    Json amps = Json::array();
    for (const auto& a : psi.amp) {
        amps.push_back(a.real());
        amps.push_back(a.imag());
    }
    j.set("amplitudes", std::move(amps));
    if (psi.spin) j.set("spin", spinor_json(*psi.spin));
    return j;
}

// ---------------------------------------------------------------------
// experiment: weak-value

ExperimentOutput run_weak_value(Resolver& r) {
    const Spinor pre = resolve_spinor(r, "pre");
    const Spinor post = resolve_spinor(r, "post");
    const Direction h = resolve_direction(r, "h");
    const double eps = r.number_or("tolerances.overlap_eps", kDefaultOverlapEps);
    r.finish();

    const TwoStateContext ctx = TwoStateContext::make(pre, post, eps);
    const cplx value = weak_spin_value_complex(ctx, h);

    ExperimentOutput out;
    Json inputs = Json::object();
    inputs.set("pre", spinor_json(pre));
    inputs.set("post", spinor_json(post));
    inputs.set("h", direction_json(h));
    inputs.set("overlap", complex_json(ctx.overlap));
    out.result.set("inputs", std::move(inputs));
    out.result.set("complex_value", complex_json(value));
    out.result.set("real_value", value.real());
    return out;
}

// ---------------------------------------------------------------------
// experiment: entangled-value

ExperimentOutput run_entangled_value(Resolver& r) {
    const MultiSpinState initial = resolve_initial_state(r);
    const Direction axis1 = resolve_direction(r, "axis1");
    const Sign outcome1 = parse_sign(r.token_or("outcome1", "+"), "outcome1");
    const Direction axis2 = resolve_direction(r, "axis2");
    const Sign outcome2 = parse_sign(r.token_or("outcome2", "+"), "outcome2");
    const Direction h = resolve_direction(r, "h");
    const double eps = r.number_or("tolerances.overlap_eps", kDefaultOverlapEps);
    r.finish();

    const EntangledContext ctx =
        EntangledContext::make(initial, axis1, axis2, outcome1, outcome2, eps);
    const double entangled = entangled_weak_value(ctx, h);
    const double reduced = reduced_weak_value(ctx, h);
    const Spinor conditional = conditional_state(initial, axis1, outcome1, eps);
    const MultiSpinState bra =
        tensor(eigenspinor(axis1, outcome1), eigenspinor(axis2, outcome2));
    const cplx full_value =
        inner2(bra, apply_on_particle(spin_operator(h), 2, initial)) / ctx.overlap;

    ExperimentOutput out;
    Json inputs = Json::object();
    Json amps = Json::array();
    for (const auto& a : initial.amp) {
        amps.push_back(a.real());
        amps.push_back(a.imag());
    }
    inputs.set("initial", std::move(amps));
    inputs.set("axis1", direction_json(axis1));
    inputs.set("outcome1", std::string(1, sign_char(outcome1)));
    inputs.set("axis2", direction_json(axis2));
    inputs.set("outcome2", std::string(1, sign_char(outcome2)));
    inputs.set("h", direction_json(h));
    inputs.set("overlap", complex_json(ctx.overlap));
    out.result.set("inputs", std::move(inputs));
    out.result.set("complex_value", complex_json(full_value));
    out.result.set("real_value", entangled);
    out.result.set("reduced_value", reduced);
    out.result.set("reduction_residual", std::abs(entangled - reduced));
    out.result.set("conditional_state", spinor_json(conditional));
    return out;
}

// ---------------------------------------------------------------------
// experiment: spin-map

ExperimentOutput run_spin_map(Resolver& r) {
    const Direction i_axis = resolve_direction(r, "i");
    const Sign i_outcome = parse_sign(r.token_or("i.outcome", "+"), "i.outcome");
    const Direction f_axis = resolve_direction(r, "f");
    const Sign f_outcome = parse_sign(r.token_or("f.outcome", "+"), "f.outcome");
    const long long n_polar = r.integer_or("map.n_polar", 60);
    const long long n_azimuth = r.integer_or("map.n_azimuth", 120);
    const double guard = r.number_or("tolerances.antiparallel_guard_deg",
                                     kDefaultAntiparallelGuardDeg);
    r.finish();
    if (n_polar < 2 || n_azimuth < 2) {
        throw ConfigInvalid("map.n_polar and map.n_azimuth must be at least 2");
    }

    const SpinVectorReport report =
        hidden_spin_vector(i_axis, f_axis, i_outcome, f_outcome, guard);

    std::vector<Direction> probes;
    probes.reserve((n_polar + 1) * n_azimuth);
    std::vector<std::pair<double, double>> angles;
    for (long long ip = 0; ip <= n_polar; ++ip) {
        const double theta = 180.0 * static_cast<double>(ip) / static_cast<double>(n_polar);
        for (long long ia = 0; ia < n_azimuth; ++ia) {
            const double phi = 360.0 * static_cast<double>(ia) / static_cast<double>(n_azimuth);
            angles.emplace_back(theta, phi);
            probes.push_back(Direction::from_polar(theta * kDegToRad, phi * kDegToRad));
        }
    }
    const auto values = component_map(i_axis, f_axis, probes, i_outcome, f_outcome, guard);

    std::string csv = "theta_polar_deg,phi_azimuth_deg,value\n";
    for (size_t i = 0; i < values.size(); ++i) {
        csv += fmt(angles[i].first) + "," + fmt(angles[i].second) + "," +
               fmt(values[i].second) + "\n";
    }

    ExperimentOutput out;
    out.files.emplace_back("spin_map.csv", std::move(csv));
    Json rep = Json::object();
    Json vec = Json::array();
    vec.push_back(report.vector[0]);
    vec.push_back(report.vector[1]);
    vec.push_back(report.vector[2]);
    rep.set("vector", std::move(vec));
    rep.set("max_direction", direction_json(report.max_direction));
    rep.set("max_value", report.max_value);
    rep.set("omega_rad", report.omega);
    rep.set("midplane_residual", report.midplane_residual);
    out.result.set("report", std::move(rep));
    return out;
}

// ---------------------------------------------------------------------
// experiment: evolve

ExperimentOutput run_evolve(Resolver& r) {
    const Grid grid = resolve_grid(r);
    const PacketParams packet = resolve_packet(r, "packet");
    const double dt = r.number("dt");
    const long long steps = r.integer("steps");
    const long long stride = r.integer_or("stride", std::max(1ll, steps / 20));
    const std::vector<double> potential = resolve_potential(r, grid);
    r.finish();
    if (steps < 0 || stride < 1) throw ConfigInvalid("steps must be >= 0 and stride >= 1");

    const GridWavefunction psi0 =
        make_gaussian(grid, packet.center, packet.sigma, packet.momentum, packet.spin);
    const EvolutionHistory hist = evolve_history(psi0, dt, static_cast<int>(steps), potential);

    std::string csv = "t,x,density,current\n";
    long long written = 0;
    for (int s = 0; s < hist.n_slices(); s += static_cast<int>(stride)) {
        const FieldPair f = current_standard(hist.slices[s]);
        for (int j = 0; j < grid.n_points; ++j) {
            csv += fmt(hist.slices[s].time) + "," + fmt(grid.x(j)) + "," + fmt(f.density[j]) +
                   "," + fmt(f.current[j]) + "\n";
        }
        ++written;
    }

    const GridWavefunction& last = hist.slices.back();
    ExperimentOutput out;
    out.files.emplace_back("evolve.csv", std::move(csv));
    out.files.emplace_back("snapshot_initial.json", snapshot_json(psi0).dump());
    out.files.emplace_back("snapshot_final.json", snapshot_json(last).dump());
    out.result.set("norm_initial", grid_norm(psi0));
    out.result.set("norm_final", grid_norm(last));
    out.result.set("norm_drift", std::abs(grid_norm(last) - grid_norm(psi0)));
    out.result.set("mean_x_initial", mean_x(psi0));
    out.result.set("mean_x_final", mean_x(last));
    out.result.set("std_x_initial", std_x(psi0));
    out.result.set("std_x_final", std_x(last));
    out.result.set("mean_p_initial", mean_p(psi0));
    out.result.set("mean_p_final", mean_p(last));
    out.result.set("slices_written", written);
    return out;
}

// ---------------------------------------------------------------------
// experiment: fields  (two-boundary j0/j1 tables)

ExperimentOutput run_fields(Resolver& r) {
    const Grid grid = resolve_grid(r);
    const PacketParams initial = resolve_packet(r, "initial");
    const PacketParams final_packet = resolve_packet(r, "final");
    const double dt = r.number("dt");
    const long long steps = r.integer("steps");
    const long long stride = r.integer_or("stride", std::max(1ll, steps / 20));
    const double eps = r.number_or("tolerances.overlap_eps", kDefaultOverlapEps);
    const std::vector<double> potential = resolve_potential(r, grid);
    r.finish();
    if (steps < 1 || stride < 1) throw ConfigInvalid("steps must be >= 1 and stride >= 1");

    const GridWavefunction psi_i =
        make_gaussian(grid, initial.center, initial.sigma, initial.momentum, initial.spin);
    GridWavefunction psi_f = make_gaussian(grid, final_packet.center, final_packet.sigma,
                                           final_packet.momentum, final_packet.spin);
    psi_f.time = steps * dt;

    const EvolutionHistory fwd = evolve_history(psi_i, dt, static_cast<int>(steps), potential);
    const EvolutionHistory bwd =
        evolve_final_backward(psi_f, dt, static_cast<int>(steps), potential);

    const cplx a = grid_inner(bwd.slices.front(), fwd.slices.front());
    std::string csv = "t,x,j0,j1\n";
    double min_j0 = 0.0, max_j0 = 0.0;
    for (int s = 0; s < fwd.n_slices(); s += static_cast<int>(stride)) {
        const FieldPair f = current_cs(fwd.slices[s], bwd.slices[s], eps);
        for (int j = 0; j < grid.n_points; ++j) {
            min_j0 = std::min(min_j0, f.density[j]);
            max_j0 = std::max(max_j0, f.density[j]);
            csv += fmt(f.time) + "," + fmt(grid.x(j)) + "," + fmt(f.density[j]) + "," +
                   fmt(f.current[j]) + "\n";
        }
    }

    ExperimentOutput out;
    out.files.emplace_back("fields.csv", std::move(csv));
    out.result.set("overlap", complex_json(a));
    out.result.set("overlap_abs", std::abs(a));
    out.result.set("min_j0", min_j0);
    out.result.set("max_j0", max_j0);
    return out;
}

// ---------------------------------------------------------------------
// experiment: trajectories

ExperimentOutput run_trajectories(Resolver& r) {
    const std::string mode = r.token_or("mode", "standard");
    if (mode != "standard" && mode != "cs") {
        throw ConfigInvalid("mode: expected standard or cs, got '" + mode + "'");
    }
    const Grid grid = resolve_grid(r);
    const PacketParams initial = resolve_packet(r, "initial");
    PacketParams final_packet;
    if (mode == "cs") final_packet = resolve_packet(r, "final");
    const double dt = r.number("dt");
    const long long steps = r.integer("steps");
    const double eps = r.number_or("tolerances.overlap_eps", kDefaultOverlapEps);

    std::vector<double> seeds;
    if (r.present("seeds.list")) {
        seeds = r.number_list("seeds.list");
    } else {
        const long long count = r.integer("seeds.count");
        const double from = r.number("seeds.x_from");
        const double to = r.number("seeds.x_to");
        if (count < 1) throw ConfigInvalid("seeds.count must be >= 1");
        for (long long i = 0; i < count; ++i) {
            seeds.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
        }
    }
    double t0 = 0.0;
    long long max_steps = 0;
    if (mode == "cs") {
        t0 = r.number_or("seeds.t0", 0.0);
        max_steps = r.integer_or("max_steps", 500000);
    }
    r.finish();
    if (steps < 1) throw ConfigInvalid("steps must be >= 1");
    if (mode == "cs" && max_steps < 1) throw ConfigInvalid("max_steps must be >= 1");

    const GridWavefunction psi_i =
        make_gaussian(grid, initial.center, initial.sigma, initial.momentum, initial.spin);
    const EvolutionHistory fwd = evolve_history(psi_i, dt, static_cast<int>(steps));

    FlowField flow;
    if (mode == "cs") {
        GridWavefunction psi_f = make_gaussian(grid, final_packet.center, final_packet.sigma,
                                               final_packet.momentum, final_packet.spin);
        psi_f.time = steps * dt;
        const EvolutionHistory bwd = evolve_final_backward(psi_f, dt, static_cast<int>(steps));
        flow = cs_flow(fwd, bwd, eps);
    } else {
        flow = standard_flow(fwd);
    }

    std::string csv = "id,lambda,t,x\n";
    long total_reversals = 0;
    long n_timelike = 0, n_lightlike = 0, n_spacelike = 0;
    Json per_traj = Json::array();

    auto classify = [&](double t, double x) {
        try {
            const FourVelocity u = four_velocity(flow.rho_at(t, x), flow.cur_at(t, x));
            if (u.cls == CausalClass::timelike) ++n_timelike;
            else if (u.cls == CausalClass::lightlike) ++n_lightlike;
            else ++n_spacelike;
        } catch (const ZeroCurrent&) {
        }
    };

    for (size_t id = 0; id < seeds.size(); ++id) {
        Json tj = Json::object();
        tj.set("id", static_cast<long long>(id));
        tj.set("x0", seeds[id]);
        try {
            if (mode == "standard") {
                const Trajectory traj = bohm_trajectory(flow, seeds[id]);
                for (const auto& [t, x] : traj.samples) {
                    csv += std::to_string(id) + "," + fmt(t) + "," + fmt(t) + "," + fmt(x) + "\n";
                    classify(t, x);
                }
                tj.set("status", "ok");
                tj.set("reversals", 0);
            } else {
                WorldLineOptions wl_opts;
                wl_opts.integ.max_steps = max_steps;
                const WorldLine wl = cs_worldline(flow, seeds[id], t0, wl_opts);
                for (const auto& s : wl.samples) {
                    csv += std::to_string(id) + "," + fmt(s.lambda) + "," + fmt(s.t) + "," +
                           fmt(s.x) + "\n";
                    classify(s.t, s.x);
                }
                total_reversals += static_cast<long>(wl.reversals.size());
                tj.set("status", "ok");
                tj.set("reversals", static_cast<long long>(wl.reversals.size()));
                Json revs = Json::array();
                for (const auto& rev : wl.reversals) {
                    Json e = Json::object();
                    e.set("lambda", rev.lambda);
                    e.set("t", rev.t);
                    e.set("x", rev.x);
                    revs.push_back(std::move(e));
                }
                tj.set("reversal_events", std::move(revs));
            }
        } catch (const Error& e) {
            tj.set("status", std::string("error: ") + e.what());
        }
        per_traj.push_back(std::move(tj));
    }

    ExperimentOutput out;
    out.files.emplace_back("trajectories.csv", std::move(csv));
    out.result.set("mode", mode);
    out.result.set("n_trajectories", static_cast<long long>(seeds.size()));
    out.result.set("reversal_count", static_cast<long long>(total_reversals));
    Json hist_json = Json::object();
    hist_json.set("timelike", static_cast<long long>(n_timelike));
    hist_json.set("lightlike", static_cast<long long>(n_lightlike));
    hist_json.set("spacelike", static_cast<long long>(n_spacelike));
    out.result.set("classification_histogram", std::move(hist_json));
    out.result.set("trajectories", std::move(per_traj));
    return out;
}

// ---------------------------------------------------------------------
// experiment: born-check

ExperimentOutput run_born_check(Resolver& r, std::uint64_t seed) {
    MeasurementSetup setup;
    setup.grid = resolve_grid(r);
    setup.packet_center = r.number_or("packet.center", 0.0);
    setup.packet_sigma = r.number("packet.sigma");
    setup.k_sep = r.number("k_sep");
    setup.dt = r.number("dt");
    setup.split_step = static_cast<int>(r.integer_or("split_step", 0));
    setup.total_steps = static_cast<int>(r.integer("total_steps"));
    setup.overlap_tol = r.number_or("tolerances.packet_overlap", 1e-6);

    if (r.present("coefficients.amplitudes")) {
        const std::vector<double> v = r.number_list("coefficients.amplitudes");
        if (v.size() != 4) {
            throw ConfigInvalid("coefficients.amplitudes: expected re,im,re,im");
        }
        setup.coefficients = {cplx(v[0], v[1]), cplx(v[2], v[3])};
    } else {
        const double p1 = r.number("coefficients.p1");
        const double phase2 = r.number_or("coefficients.phase2_deg", 0.0) * kDegToRad;
        if (p1 <= 0.0 || p1 >= 1.0) {
            throw ConfigInvalid("coefficients.p1 must lie strictly between 0 and 1");
        }
        setup.coefficients = {cplx(std::sqrt(p1), 0.0),
                              std::sqrt(1.0 - p1) * cplx(std::cos(phase2), std::sin(phase2))};
    }
    const long long n = r.integer("n_particles");
    const double tol_sigmas = r.number_or("tolerance_sigmas", 3.0);
    r.finish();
    if (n < 1) throw ConfigInvalid("n_particles must be >= 1");
    if (tol_sigmas < 0.0) throw ConfigInvalid("tolerance_sigmas must be >= 0");
    try {
        setup.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(e.what());
    }

    const EnsembleRun run = born_experiment(setup, static_cast<int>(n), seed);
    const double p1 = run.expected[0];
    const double freq1 = static_cast<double>(run.outcome_counts[0]) / n;
    const double sigma = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(n));
    const double deviation = std::abs(freq1 - p1);

    ExperimentOutput out;
    out.pass = deviation <= tol_sigmas * sigma;
    out.result.set("seed", seed);
    Json counts = Json::array();
    counts.push_back(static_cast<long long>(run.outcome_counts[0]));
    counts.push_back(static_cast<long long>(run.outcome_counts[1]));
    out.result.set("counts", std::move(counts));
    Json expected = Json::array();
    expected.push_back(run.expected[0]);
    expected.push_back(run.expected[1]);
    out.result.set("expected", std::move(expected));
    Json freq = Json::array();
    freq.push_back(freq1);
    freq.push_back(1.0 - freq1);
    out.result.set("frequency", std::move(freq));
    out.result.set("sigma", sigma);
    out.result.set("tolerance_sigmas", tol_sigmas);
    out.result.set("deviation_sigmas", sigma > 0.0 ? deviation / sigma : 0.0);
    out.result.set("ks_statistic", run.max_ks_statistic);
    out.result.set("pass", out.pass);
    return out;
}

// ---------------------------------------------------------------------
// experiment: appendix-check

ExperimentOutput run_appendix_check(Resolver& r) {
    const Grid grid = resolve_grid(r);
    const PacketParams packet = resolve_packet(r, "packet");
    const std::string basis_kind = r.token_or("basis", "plane-wave");
    const double tol_rel = r.number_or("tolerance_rel", 1e-8);
    const double eps = r.number_or("tolerances.overlap_eps", kDefaultOverlapEps);
    r.finish();

    const GridWavefunction psi_i =
        make_gaussian(grid, packet.center, packet.sigma, packet.momentum);
    std::vector<GridWavefunction> basis;
    if (basis_kind == "plane-wave") {
        basis = plane_wave_basis(grid, psi_i.time);
    } else if (basis_kind == "contains-initial") {
        basis = basis_containing(psi_i);
    } else {
        throw ConfigInvalid("basis: expected plane-wave or contains-initial");
    }

    const double deviation = appendix_average_check(psi_i, basis, eps);
    const FieldPair standard = current_standard(psi_i);
    double max_j = 0.0;
    for (double j : standard.current) max_j = std::max(max_j, std::abs(j));
    const double bound = tol_rel * max_j;

    ExperimentOutput out;
    out.pass = deviation < bound;
    out.result.set("basis", basis_kind);
    out.result.set("max_deviation", deviation);
    out.result.set("bound", bound);
    out.result.set("max_standard_current", max_j);
    out.result.set("tolerance_rel", tol_rel);
    out.result.set("pass", out.pass);
    return out;
}

// ---------------------------------------------------------------------
// experiment: equivariance

ExperimentOutput run_equivariance(Resolver& r, std::uint64_t seed) {
    const Grid grid = resolve_grid(r);
    const PacketParams packet = resolve_packet(r, "packet");
    const double dt = r.number("dt");
    const long long steps = r.integer("steps");
    const double t_check = r.number_or("t_check", dt * steps);
    const long long n = r.integer("n_particles");
    const double alpha = r.number_or("alpha", 0.01);
    r.finish();
    if (steps < 1 || n < 1) throw ConfigInvalid("steps and n_particles must be >= 1");

    const GridWavefunction psi0 =
        make_gaussian(grid, packet.center, packet.sigma, packet.momentum);
    const EvolutionHistory hist = evolve_history(psi0, dt, static_cast<int>(steps));
    const std::vector<double> starts = sample_positions(psi0, static_cast<int>(n), seed);
    const double ks = equivariance_check(hist, starts, t_check);
    const double critical = ks_critical_value(static_cast<int>(n), alpha);

    ExperimentOutput out;
    out.pass = ks < critical;
    out.result.set("seed", seed);
    out.result.set("n_particles", n);
    out.result.set("t_check", t_check);
    out.result.set("ks_statistic", ks);
    out.result.set("critical_value", critical);
    out.result.set("alpha", alpha);
    out.result.set("pass", out.pass);
    return out;
}

}  // namespace

int run_experiment(Config& cfg, const RunOptions& options) {
    Resolver r(cfg);
    std::string kind;
    std::string out_dir;
    std::uint64_t seed = 0;
    try {
        if (options.seed_override) cfg.set("seed", std::to_string(*options.seed_override));
        kind = r.token("experiment");
        seed = r.u64_or("seed", 0);
        if (options.out_dir) cfg.set("out", *options.out_dir);
        out_dir = r.token_or("out", ".");

        ExperimentOutput out;
        if (kind == "weak-value") {
            out = run_weak_value(r);
        } else if (kind == "entangled-value") {
            out = run_entangled_value(r);
        } else if (kind == "spin-map") {
            out = run_spin_map(r);
        } else if (kind == "evolve") {
            out = run_evolve(r);
        } else if (kind == "fields") {
            out = run_fields(r);
        } else if (kind == "trajectories") {
            out = run_trajectories(r);
        } else if (kind == "born-check") {
            out = run_born_check(r, seed);
        } else if (kind == "appendix-check") {
            out = run_appendix_check(r);
        } else if (kind == "equivariance") {
            out = run_equivariance(r, seed);
        } else {
            throw ConfigInvalid("experiment: unknown kind '" + kind + "'");
        }

        const int code = out.pass ? kExitOk : kExitExperimentFailed;
        Json summary = Json::object();
        summary.set("experiment", kind);
        summary.set("status", out.pass ? "ok" : "failed");
        summary.set("exit_code", code);
        summary.set("result", std::move(out.result));
        Json echo = Json::object();
        for (const auto& [k, v] : r.echo()) echo.set(k, v);
        summary.set("config_echo", std::move(echo));
        Json files = Json::array();
        files.push_back("summary.json");
        files.push_back("resolved_config.txt");
        for (const auto& [name, _] : out.files) files.push_back(name);
        summary.set("outputs", std::move(files));

        namespace fs = std::filesystem;
        for (const auto& [name, content] : out.files) {
            atomic_write((fs::path(out_dir) / name).string(), content);
        }
        atomic_write((fs::path(out_dir) / "resolved_config.txt").string(), r.echo_text());
        atomic_write((fs::path(out_dir) / "summary.json").string(), summary.dump());

        if (!options.quiet) {
            std::printf("%s: %s (%s/summary.json)\n", kind.c_str(),
                        out.pass ? "ok" : "FAILED", out_dir.c_str());
        }
        return code;
    } catch (const ConfigInvalid& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigInvalid;
    } catch (const Error& e) {
        std::fprintf(stderr, "experiment error: %s\n", e.what());
        if (!out_dir.empty()) {
            Json summary = Json::object();
            summary.set("experiment", kind);
            summary.set("status", "error");
            summary.set("exit_code", kExitExperimentFailed);
            summary.set("error", std::string(e.what()));
            Json echo = Json::object();
            for (const auto& [k, v] : r.echo()) echo.set(k, v);
            summary.set("config_echo", std::move(echo));
            try {
                namespace fs = std::filesystem;
                atomic_write((fs::path(out_dir) / "summary.json").string(), summary.dump());
            } catch (...) {
            }
        }
        return kExitExperimentFailed;
    }
}

}  // namespace csb
