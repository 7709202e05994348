#include "csb/wavepacket.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <string>

namespace csb {

namespace {

constexpr double kPi = std::numbers::pi;

// Thin RAII wrapper over in-place 1D FFTW transforms. Plans are created
// with FFTW_ESTIMATE so planning never depends on runtime measurement.
// Not thread-safe (neither is the FFTW planner); all callers here are
// single-threaded per wavefunction.
class Fft1D {
  public:
    explicit Fft1D(int n) : n_(n) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        fwd_ = fftw_plan_dft_1d(n_, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n_, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft1D() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft1D(const Fft1D&) = delete;
    Fft1D& operator=(const Fft1D&) = delete;

    void forward(std::vector<cplx>& a) { run(fwd_, a, 1.0); }
    void backward(std::vector<cplx>& a) { run(bwd_, a, 1.0 / n_); }

  private:
    void run(fftw_plan plan, std::vector<cplx>& a, double scale) {
        for (int j = 0; j < n_; ++j) {
            buf_[j][0] = a[j].real();
            buf_[j][1] = a[j].imag();
        }
        fftw_execute(plan);
        for (int j = 0; j < n_; ++j) {
            a[j] = cplx(buf_[j][0] * scale, buf_[j][1] * scale);
        }
    }

    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

// FFT frequency of bin j for period L: 2*pi*m/L with m wrapped to the
// symmetric range (-n/2, n/2].
double fft_k(int j, int n, double length) {
    const int m = (2 * j <= n) ? j : j - n;
    return 2.0 * kPi * m / length;
}

std::vector<cplx> phase_factors(int n, double length, double coeff) {
    // exp(-i * coeff * k^2) per bin.
    std::vector<cplx> f(n);
    for (int j = 0; j < n; ++j) {
        const double k = fft_k(j, n, length);
        const double ph = -coeff * k * k;
        f[j] = cplx(std::cos(ph), std::sin(ph));
    }
    return f;
}

void require_potential(const Grid& grid, const std::vector<double>& potential) {
    if (!potential.empty() && static_cast<int>(potential.size()) != grid.n_points) {
        throw std::invalid_argument("potential must be empty or have one sample per grid point");
    }
}

void require_same_slice(const GridWavefunction& a, const GridWavefunction& b) {
    if (!(a.grid == b.grid)) {
        throw std::invalid_argument("wavefunctions live on different grids");
    }
    if (std::abs(a.time - b.time) > 1e-9 * std::max(1.0, std::abs(a.time))) {
        throw std::invalid_argument("wavefunctions are at different times");
    }
    if (a.spin.has_value() != b.spin.has_value()) {
        throw std::invalid_argument("one wavefunction carries spin and the other does not");
    }
}

// Central differences, second-order one-sided at the edges.
std::vector<cplx> d_dx(const Grid& grid, const std::vector<cplx>& a) {
    const int n = grid.n_points;
    const double dx = grid.dx();
    std::vector<cplx> d(n);
    for (int j = 1; j + 1 < n; ++j) d[j] = (a[j + 1] - a[j - 1]) / (2.0 * dx);
    d[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * dx);
    d[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * dx);
    return d;
}

}  // namespace

Grid::Grid(double x_min_, double x_max_, int n_points_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_) {
    if (n_points < 16) throw std::invalid_argument("Grid: n_points must be >= 16");
    if (!(x_max > x_min)) throw std::invalid_argument("Grid: x_max must exceed x_min");
}

bool tails_ok(const Grid& grid, const std::vector<cplx>& amp) {
    const int n = grid.n_points;
    const int edge = std::max(1, static_cast<int>(n * kTailFraction));
    double peak = 0.0;
    for (const auto& a : amp) peak = std::max(peak, std::abs(a));
    if (peak == 0.0) return true;
    double tail = 0.0;
    for (int j = 0; j < edge; ++j) {
        tail = std::max(tail, std::abs(amp[j]));
        tail = std::max(tail, std::abs(amp[n - 1 - j]));
    }
    return tail < kTailRelBound * peak;
}

GridWavefunction make_gaussian(const Grid& grid, double x0, double sigma, double k,
                               std::optional<Spinor> spin) {
    if (sigma <= 0.0) throw std::invalid_argument("make_gaussian: sigma must be positive");
    GridWavefunction psi;
    psi.grid = grid;
    psi.amp.resize(grid.n_points);
    psi.spin = spin;
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        const double env = std::exp(-(x - x0) * (x - x0) / (2.0 * sigma * sigma));
        psi.amp[j] = env * cplx(std::cos(k * x), std::sin(k * x));
    }
    double nrm = 0.0;
    for (int j = 0; j < grid.n_points; ++j) nrm += grid.weight(j) * std::norm(psi.amp[j]);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw PacketTooWide("make_gaussian: packet underflowed to zero on this grid");
    for (auto& a : psi.amp) a /= nrm;
    if (!tails_ok(grid, psi.amp)) {
        throw PacketTooWide("make_gaussian: packet tails exceed the grid-edge bound");
    }
    return psi;
}

cplx grid_inner(const GridWavefunction& a, const GridWavefunction& b) {
    require_same_slice(a, b);
    cplx s(0.0, 0.0);
    for (int j = 0; j < a.grid.n_points; ++j) {
        s += a.grid.weight(j) * std::conj(a.amp[j]) * b.amp[j];
    }
    if (a.spin && b.spin) s *= inner(*a.spin, *b.spin);
    return s;
}

double grid_norm(const GridWavefunction& a) {
    double s = 0.0;
    for (int j = 0; j < a.grid.n_points; ++j) s += a.grid.weight(j) * std::norm(a.amp[j]);
    if (a.spin) s *= a.spin->norm_sq();
    return std::sqrt(s);
}

GridWavefunction momentum_kick(const GridWavefunction& psi, double k) {
    GridWavefunction out = psi;
    for (int j = 0; j < psi.grid.n_points; ++j) {
        const double x = psi.grid.x(j);
        out.amp[j] *= cplx(std::cos(k * x), std::sin(k * x));
    }
    return out;
}

EvolutionHistory evolve_history(const GridWavefunction& psi0, double dt, int steps,
                                const std::vector<double>& potential) {
    if (dt <= 0.0) throw UnstableStep("evolve: dt must be positive");
    if (steps < 0) throw std::invalid_argument("evolve: steps must be >= 0");
    require_potential(psi0.grid, potential);
    if (!tails_ok(psi0.grid, psi0.amp)) {
        throw UnstableStep("evolve: initial state violates the grid-tail bound");
    }

    const int n = psi0.grid.n_points;
    const double length = psi0.grid.length();
    EvolutionHistory hist;
    hist.dt = dt;
    hist.slices.reserve(steps + 1);
    hist.slices.push_back(psi0);
    if (steps == 0) return hist;

    Fft1D fft(n);
    const bool free_particle = potential.empty();
    // Free: one full kinetic factor per step. With a potential: Strang
    // half-kinetic / potential / half-kinetic.
    const std::vector<cplx> kin_full = phase_factors(n, length, 0.5 * dt);
    const std::vector<cplx> kin_half = phase_factors(n, length, 0.25 * dt);
    std::vector<cplx> vphase;
    if (!free_particle) {
        vphase.resize(n);
        for (int j = 0; j < n; ++j) {
            vphase[j] = cplx(std::cos(-potential[j] * dt), std::sin(-potential[j] * dt));
        }
    }

    std::vector<cplx> amp = psi0.amp;
    for (int s = 1; s <= steps; ++s) {
        if (free_particle) {
            fft.forward(amp);
            for (int j = 0; j < n; ++j) amp[j] *= kin_full[j];
            fft.backward(amp);
        } else {
            fft.forward(amp);
            for (int j = 0; j < n; ++j) amp[j] *= kin_half[j];
            fft.backward(amp);
            for (int j = 0; j < n; ++j) amp[j] *= vphase[j];
            fft.forward(amp);
            for (int j = 0; j < n; ++j) amp[j] *= kin_half[j];
            fft.backward(amp);
        }
        if (!tails_ok(psi0.grid, amp)) {
            throw UnstableStep("evolve: state reached the grid boundary at step " +
                               std::to_string(s));
        }
        GridWavefunction slice;
        slice.grid = psi0.grid;
        slice.amp = amp;
        slice.time = psi0.time + s * dt;
        slice.spin = psi0.spin;
        hist.slices.push_back(std::move(slice));
    }
    return hist;
}

GridWavefunction evolve(const GridWavefunction& psi, double dt, int steps,
                        const std::vector<double>& potential) {
    EvolutionHistory hist = evolve_history(psi, dt, steps, potential);
    return std::move(hist.slices.back());
}

EvolutionHistory evolve_final_backward(const GridWavefunction& psi_f_at_tf, double dt, int steps,
                                       const std::vector<double>& potential) {
    // conj(psi_f(t_f - s)) solves the forward equation, so run the forward
    // stepper on the conjugate and conjugate back. This makes a backward
    // pass the exact inverse of a forward pass.
    GridWavefunction seed = psi_f_at_tf;
    for (auto& a : seed.amp) a = std::conj(a);
    EvolutionHistory fwd = evolve_history(seed, dt, steps, potential);

    EvolutionHistory out;
    out.dt = dt;
    out.slices.resize(fwd.slices.size());
    const double tf = psi_f_at_tf.time;
    for (int j = 0; j <= steps; ++j) {
        GridWavefunction slice = std::move(fwd.slices[steps - j]);
        for (auto& a : slice.amp) a = std::conj(a);
        slice.time = tf - (steps - j) * dt;
        slice.spin = psi_f_at_tf.spin;
        out.slices[j] = std::move(slice);
    }
    return out;
}

FieldPair current_standard(const GridWavefunction& psi) {
    const int n = psi.grid.n_points;
    FieldPair out;
    out.time = psi.time;
    out.density.resize(n);
    out.current.resize(n);
    const std::vector<cplx> d = d_dx(psi.grid, psi.amp);
    for (int j = 0; j < n; ++j) {
        out.density[j] = std::norm(psi.amp[j]);
        out.current[j] = (std::conj(psi.amp[j]) * d[j]).imag();
    }
    return out;
}

FieldPair current_cs(const GridWavefunction& psi_i, const GridWavefunction& psi_f,
                     double eps_overlap) {
    require_same_slice(psi_i, psi_f);
    const cplx a = grid_inner(psi_f, psi_i);
    if (std::abs(a) <= eps_overlap) {
        throw ZeroOverlap("current_cs: |<psi_f|psi_i>| = " + std::to_string(std::abs(a)) +
                          " <= " + std::to_string(eps_overlap));
    }
    const cplx spin_factor =
        (psi_i.spin && psi_f.spin) ? inner(*psi_f.spin, *psi_i.spin) : cplx(1.0, 0.0);

    const int n = psi_i.grid.n_points;
    FieldPair out;
    out.time = psi_i.time;
    out.density.resize(n);
    out.current.resize(n);
    const std::vector<cplx> di = d_dx(psi_i.grid, psi_i.amp);
    const std::vector<cplx> df = d_dx(psi_f.grid, psi_f.amp);
    const cplx inv_2i(0.0, -0.5);  // 1/(2i)
    for (int j = 0; j < n; ++j) {
        const cplx fbar = std::conj(psi_f.amp[j]);
        out.density[j] = (fbar * psi_i.amp[j] * spin_factor / a).real();
        const cplx flux = (fbar * di[j] - std::conj(df[j]) * psi_i.amp[j]) * spin_factor / a;
        out.current[j] = (inv_2i * flux).real();
    }
    return out;
}

std::vector<double> spin_density(const GridWavefunction& psi_i, const GridWavefunction& psi_f,
                                 const Direction& h, double eps_overlap) {
    require_same_slice(psi_i, psi_f);
    if (!psi_i.spin || !psi_f.spin) {
        throw std::invalid_argument("spin_density: both states must carry spin");
    }
    const cplx a = grid_inner(psi_f, psi_i);
    if (std::abs(a) <= eps_overlap) {
        throw ZeroOverlap("spin_density: |<psi_f|psi_i>| <= threshold");
    }
    const cplx spin_me = inner(*psi_f.spin, spin_operator(h).apply(*psi_i.spin));
    const int n = psi_i.grid.n_points;
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) {
        out[j] = (std::conj(psi_f.amp[j]) * psi_i.amp[j] * spin_me / a).real();
    }
    return out;
}

double mean_x(const GridWavefunction& psi) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < psi.grid.n_points; ++j) {
        const double w = psi.grid.weight(j) * std::norm(psi.amp[j]);
        num += w * psi.grid.x(j);
        den += w;
    }
    return num / den;
}

double std_x(const GridWavefunction& psi) {
    const double mu = mean_x(psi);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < psi.grid.n_points; ++j) {
        const double w = psi.grid.weight(j) * std::norm(psi.amp[j]);
        num += w * (psi.grid.x(j) - mu) * (psi.grid.x(j) - mu);
        den += w;
    }
    return std::sqrt(num / den);
}

double mean_p(const GridWavefunction& psi) {
    const int n = psi.grid.n_points;
    Fft1D fft(n);
    std::vector<cplx> spec = psi.amp;
    fft.forward(spec);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        const double w = std::norm(spec[j]);
        num += w * fft_k(j, n, psi.grid.length());
        den += w;
    }
    return num / den;
}

}  // namespace csb
