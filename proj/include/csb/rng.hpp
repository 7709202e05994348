#pragma once

#include <cstdint>
#include <random>

namespace csb {

// Deterministic random streams. Identity: std::mt19937_64 seeded directly
// with the given value; uniform doubles take the top 53 bits of each draw
// ((w >> 11) * 2^-53), so sequences are reproducible bit-for-bit for a
// fixed seed. split() derives an independent child stream by passing the
// next draw through SplitMix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller; consumes two draws per pair.
    double normal();

    Rng split() { return Rng(splitmix64(gen_())); }

    static std::uint64_t splitmix64(std::uint64_t x);

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace csb
