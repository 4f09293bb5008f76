#ifndef SHADOWCAST_RNG_HPP
#define SHADOWCAST_RNG_HPP

#include <cmath>
#include <cstdint>

namespace shadowcast::rng {

// SplitMix64; used to expand seeds into xoshiro state and to derive substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic substream seed for (master seed, stream tag) pairs.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0xda3e39cb94b95bdbULL * (tag + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// xoshiro256++ (Blackman & Vigna). Bit-portable 64-bit generator.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed = 1) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1); never returns an endpoint
    double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal(double mean = 0.0, double sigma = 1.0) {
        // Box-Muller; one deviate per uniform pair keeps the stream call-order free.
        const double u1 = uniform_open();
        const double u2 = uniform();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(6.283185307179586476925286766559 * u2);
    }

    // Exact Poisson sampling: sequential inversion below mean 10,
    // Hoermann's PTRS transformed rejection above (exact, stable for large means).
    long long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 10.0) return poisson_inversion(mean);
        return poisson_ptrs(mean);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    long long poisson_inversion(double mean) {
        const double enlam = std::exp(-mean);
        long long k = 0;
        double prod = 1.0;
        for (;;) {
            prod *= uniform();
            if (prod <= enlam) return k;
            ++k;
        }
    }

    long long poisson_ptrs(double mean) {
        const double slam = std::sqrt(mean);
        const double loglam = std::log(mean);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = uniform() - 0.5;
            const double v = uniform();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<long long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
                kf * loglam - mean - std::lgamma(kf + 1.0))
                return static_cast<long long>(kf);
        }
    }

    std::uint64_t state_[4];
};

}  // namespace shadowcast::rng

#endif
