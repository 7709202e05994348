#include "csb/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "csb/rng.hpp"

namespace csb {

namespace {

// Cumulative trapezoid of a density, normalized to end at 1.
std::vector<double> density_cdf_of(const std::vector<double>& rho, double dx) {
    const int n = static_cast<int>(rho.size());
    std::vector<double> cdf(n, 0.0);
    for (int j = 1; j < n; ++j) {
        cdf[j] = cdf[j - 1] + 0.5 * dx * (rho[j - 1] + rho[j]);
    }
    const double total = cdf.back();
    if (total <= 0.0) throw std::invalid_argument("density_cdf: zero density");
    for (auto& c : cdf) c /= total;
    return cdf;
}

std::vector<double> density_cdf(const GridWavefunction& psi) {
    std::vector<double> rho(psi.grid.n_points);
    for (int j = 0; j < psi.grid.n_points; ++j) rho[j] = std::norm(psi.amp[j]);
    return density_cdf_of(rho, psi.grid.dx());
}

// Spatial-support overlap of two envelopes: the L2 pairing of |a| and |b|.
// The plain inner product would miss coincident packets with different
// momenta (they are nearly orthogonal), so beam disjointness is judged on
// magnitudes.
double envelope_overlap(const GridWavefunction& a, const GridWavefunction& b) {
    double s = 0.0;
    for (int j = 0; j < a.grid.n_points; ++j) {
        s += a.grid.weight(j) * std::abs(a.amp[j]) * std::abs(b.amp[j]);
    }
    return s;
}

}  // namespace

std::vector<double> sample_positions(const GridWavefunction& psi, int n, std::uint64_t seed) {
    const std::vector<double> cdf = density_cdf(psi);
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        int hi = static_cast<int>(it - cdf.begin());
        hi = std::clamp(hi, 1, psi.grid.n_points - 1);
        const int lo = hi - 1;
        const double span = cdf[hi] - cdf[lo];
        const double f = span > 0.0 ? (u - cdf[lo]) / span : 0.5;
        out.push_back(psi.grid.x(lo) + f * psi.grid.dx());
    }
    return out;
}

void MeasurementSetup::validate() const {
    double total = 0.0;
    for (const auto& c : coefficients) total += std::norm(c);
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("MeasurementSetup: sum |c|^2 = " + std::to_string(total) +
                                    " != 1");
    }
    if (k_sep <= 0.0) throw std::invalid_argument("MeasurementSetup: k_sep must be positive");
    if (dt <= 0.0) throw std::invalid_argument("MeasurementSetup: dt must be positive");
    if (split_step < 0 || total_steps <= split_step) {
        throw std::invalid_argument("MeasurementSetup: need 0 <= split_step < total_steps");
    }
}

EnsembleRun born_experiment(const MeasurementSetup& setup, int n, std::uint64_t seed,
                            const IntegratorOptions& integ) {
    setup.validate();

    // The measured state is envelope (x) spin, with the two spin branches
    // tagged by orthogonal internal states. The kick correlates branch m
    // with momentum +-k_sep; because the branches never interfere, the
    // guiding flow is the |c_m|^2-weighted sum of the per-branch flows
    // (relative phases of the coefficients are unobservable here).
    const std::array<double, 2> weights = {std::norm(setup.coefficients[0]),
                                           std::norm(setup.coefficients[1])};
    const std::array<double, 2> kicks = {+setup.k_sep, -setup.k_sep};

    GridWavefunction base = make_gaussian(setup.grid, setup.packet_center, setup.packet_sigma, 0.0);

    // Common-envelope segment before the kick.
    EvolutionHistory pre;
    if (setup.split_step > 0) {
        pre = evolve_history(base, setup.dt, setup.split_step);
    }
    const GridWavefunction& at_split = setup.split_step > 0 ? pre.slices.back() : base;

    const int post_steps = setup.total_steps - setup.split_step;
    std::array<EvolutionHistory, 2> branch;
    for (int m = 0; m < 2; ++m) {
        branch[m] = evolve_history(momentum_kick(at_split, kicks[m]), setup.dt, post_steps);
    }

    // Outcome regions are only meaningful once the beams are disjoint in
    // space.
    const double final_overlap =
        envelope_overlap(branch[0].slices.back(), branch[1].slices.back());
    if (final_overlap >= setup.overlap_tol) {
        throw PacketsNotSeparated("born_experiment: final beam overlap " +
                                  std::to_string(final_overlap) + " >= " +
                                  std::to_string(setup.overlap_tol));
    }

    // Weighted incoherent flow after the kick.
    const std::array<FlowField, 2> branch_flow = {standard_flow(branch[0]),
                                                  standard_flow(branch[1])};
    FlowField flow_post;
    flow_post.grid = setup.grid;
    flow_post.t0 = branch_flow[0].t0;
    flow_post.dt = setup.dt;
    flow_post.rho.resize(post_steps + 1);
    flow_post.cur.resize(post_steps + 1);
    for (int s = 0; s <= post_steps; ++s) {
        flow_post.rho[s].resize(setup.grid.n_points);
        flow_post.cur[s].resize(setup.grid.n_points);
        for (int j = 0; j < setup.grid.n_points; ++j) {
            flow_post.rho[s][j] =
                weights[0] * branch_flow[0].rho[s][j] + weights[1] * branch_flow[1].rho[s][j];
            flow_post.cur[s][j] =
                weights[0] * branch_flow[0].cur[s][j] + weights[1] * branch_flow[1].cur[s][j];
            flow_post.max_abs_rho = std::max(flow_post.max_abs_rho,
                                             std::abs(flow_post.rho[s][j]));
        }
    }

    // Quantum equilibrium at t = 0; the branch densities coincide there, so
    // this is the plain packet density.
    const std::vector<double> starts = sample_positions(base, n, seed);

    FlowField flow_pre;
    if (setup.split_step > 0) flow_pre = standard_flow(pre);

    EnsembleRun run;
    run.seed = seed;
    run.n_particles = n;
    run.expected = weights;

    std::vector<double> endpoints;
    endpoints.reserve(n);
    for (double x0 : starts) {
        double x_split = x0;
        if (setup.split_step > 0) {
            x_split = bohm_trajectory(flow_pre, x0, integ).x_final();
        }
        const double x_end = bohm_trajectory(flow_post, x_split, integ).x_final();
        endpoints.push_back(x_end);
        if (x_end > 0.0) {
            ++run.outcome_counts[0];
        } else if (x_end < 0.0) {
            ++run.outcome_counts[1];
        } else {
            throw Error("born_experiment: endpoint exactly on the outcome boundary");
        }
    }

    // Equivariance cross-check against the final combined density.
    std::vector<double> xs(setup.grid.n_points);
    for (int j = 0; j < setup.grid.n_points; ++j) xs[j] = setup.grid.x(j);
    run.max_ks_statistic =
        ks_statistic(std::move(endpoints), xs, density_cdf_of(flow_post.rho.back(),
                                                              setup.grid.dx()));
    return run;
}

double ks_statistic(std::vector<double> samples, const std::vector<double>& xs,
                    const std::vector<double>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    auto cdf_at = [&](double x) {
        if (x <= xs.front()) return 0.0;
        if (x >= xs.back()) return 1.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const int hi = static_cast<int>(it - xs.begin());
        const int lo = hi - 1;
        const double f = (x - xs[lo]) / (xs[hi] - xs[lo]);
        return cdf[lo] * (1 - f) + cdf[hi] * f;
    };
    double worst = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double fx = cdf_at(samples[i]);
        worst = std::max(worst, std::abs(fx - static_cast<double>(i) / n));
        worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - fx));
    }
    return worst;
}

double ks_critical_value(int n, double alpha) {
    if (n <= 0) throw std::invalid_argument("ks_critical_value: n must be positive");
    if (alpha <= 0.0 || alpha >= 1.0) {
        throw std::invalid_argument("ks_critical_value: alpha must lie in (0, 1)");
    }
    return std::sqrt(-0.5 * std::log(alpha / 2.0) / n);
}

double equivariance_check(const EvolutionHistory& hist, const std::vector<double>& start_positions,
                          double t_check, const IntegratorOptions& integ) {
    const double rel = (t_check - hist.t_begin()) / hist.dt;
    const int slice = static_cast<int>(std::lround(rel));
    if (slice < 0 || slice >= hist.n_slices() ||
        std::abs(rel - slice) > 1e-6) {
        throw std::invalid_argument("equivariance_check: t_check must land on a stored slice");
    }

    const FlowField flow = standard_flow(hist);
    std::vector<double> endpoints;
    endpoints.reserve(start_positions.size());
    for (double x0 : start_positions) {
        if (slice == 0) {
            endpoints.push_back(x0);
            continue;
        }
        const Trajectory traj = bohm_trajectory(flow, x0, integ);
        endpoints.push_back(traj.samples[slice].second);
    }

    const Grid& grid = hist.grid();
    std::vector<double> xs(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) xs[j] = grid.x(j);
    return ks_statistic(std::move(endpoints), xs, density_cdf(hist.slices[slice]));
}

double appendix_average_check(const GridWavefunction& psi_i,
                              const std::vector<GridWavefunction>& final_basis,
                              double eps_overlap, double completeness_tol) {
    const Grid& grid = psi_i.grid;
    const int n = grid.n_points;
    if (static_cast<int>(final_basis.size()) != n) {
        throw IncompleteBasis("appendix_average_check: basis has " +
                              std::to_string(final_basis.size()) + " elements, grid needs " +
                              std::to_string(n));
    }

    // Resolution of identity for a square system is equivalent to
    // orthonormality under the same inner product; check the Gram matrix.
    // Work with sqrt(weight)-scaled columns so the Gram is a plain dot.
    std::vector<std::vector<cplx>> scaled(n);
    for (int a = 0; a < n; ++a) {
        if (!(final_basis[a].grid == grid)) {
            throw std::invalid_argument("appendix_average_check: basis grid mismatch");
        }
        scaled[a].resize(n);
        for (int j = 0; j < n; ++j) {
            scaled[a][j] = std::sqrt(grid.weight(j)) * final_basis[a].amp[j];
        }
    }
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            cplx g(0.0, 0.0);
            const cplx* pa = scaled[a].data();
            const cplx* pb = scaled[b].data();
            for (int j = 0; j < n; ++j) g += std::conj(pa[j]) * pb[j];
            const double dev = std::abs(g - (a == b ? cplx(1.0, 0.0) : cplx(0.0, 0.0)));
            worst = std::max(worst, dev);
        }
    }
    if (worst > completeness_tol) {
        throw IncompleteBasis("appendix_average_check: orthonormality residual " +
                              std::to_string(worst) + " > " + std::to_string(completeness_tol));
    }

    const FieldPair standard = current_standard(psi_i);
    std::vector<double> weighted(n, 0.0);
    for (int a = 0; a < n; ++a) {
        const cplx overlap = grid_inner(final_basis[a], psi_i);
        const double p = std::norm(overlap);
        if (std::abs(overlap) <= eps_overlap) continue;  // weight kills the pole
        const FieldPair cs = current_cs(psi_i, final_basis[a], eps_overlap);
        for (int j = 0; j < n; ++j) weighted[j] += p * cs.current[j];
    }

    double max_dev = 0.0;
    for (int j = 0; j < n; ++j) {
        max_dev = std::max(max_dev, std::abs(weighted[j] - standard.current[j]));
    }
    return max_dev;
}

std::vector<GridWavefunction> plane_wave_basis(const Grid& grid, double time) {
    const int n = grid.n_points;
    std::vector<GridWavefunction> basis(n);
    for (int k = 0; k < n; ++k) {
        basis[k].grid = grid;
        basis[k].time = time;
        basis[k].amp.resize(n);
        for (int j = 0; j < n; ++j) {
            const double ph = 2.0 * std::numbers::pi * k * j / n;
            basis[k].amp[j] = cplx(std::cos(ph), std::sin(ph)) / std::sqrt(n * grid.weight(j));
        }
    }
    return basis;
}

std::vector<GridWavefunction> basis_containing(const GridWavefunction& psi_i) {
    const Grid& grid = psi_i.grid;
    const int n = grid.n_points;
    std::vector<GridWavefunction> basis;
    basis.reserve(n);

    GridWavefunction first = psi_i;
    first.spin.reset();
    const double nrm = grid_norm(first);
    if (nrm == 0.0) throw std::invalid_argument("basis_containing: zero state");
    for (auto& a : first.amp) a /= nrm;
    basis.push_back(std::move(first));

    auto w_inner = [&](const GridWavefunction& a, const GridWavefunction& b) {
        cplx s(0.0, 0.0);
        for (int j = 0; j < n; ++j) s += grid.weight(j) * std::conj(a.amp[j]) * b.amp[j];
        return s;
    };

    const std::vector<GridWavefunction> candidates = plane_wave_basis(grid, psi_i.time);
    for (const auto& cand : candidates) {
        if (static_cast<int>(basis.size()) == n) break;
        GridWavefunction v = cand;
        // Modified Gram-Schmidt, twice, to push the residual to roundoff.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : basis) {
                const cplx proj = w_inner(u, v);
                for (int j = 0; j < n; ++j) v.amp[j] -= proj * u.amp[j];
            }
        }
        double rn = 0.0;
        for (int j = 0; j < n; ++j) rn += grid.weight(j) * std::norm(v.amp[j]);
        rn = std::sqrt(rn);
        if (rn < 1e-6) continue;  // the direction already spanned (psi_i itself)
        for (auto& a : v.amp) a /= rn;
        basis.push_back(std::move(v));
    }
    if (static_cast<int>(basis.size()) != n) {
        throw IncompleteBasis("basis_containing: Gram-Schmidt lost rank");
    }
    return basis;
}

}  // namespace csb
