#pragma once

#include <cstdint>

namespace levlim {

/// SplitMix64; used only to expand (seed, path index) into stream state.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256++ with per-path streams derived from (seed, path_index), so
/// results do not depend on thread scheduling.
class Xoshiro256pp {
public:
    Xoshiro256pp(std::uint64_t seed, std::uint64_t path_index) {
        SplitMix64 sm{seed ^ (0x9e3779b97f4a7c15ULL * (path_index + 1))};
        for (auto& w : s_) w = sm.next();
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// Standard normals via the Marsaglia polar method (no trig, exact pairs).
class NormalSampler {
public:
    NormalSampler(std::uint64_t seed, std::uint64_t path_index)
        : rng_(seed, path_index) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.uniform() - 1.0;
            v = 2.0 * rng_.uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    static constexpr const char* name() {
        return "xoshiro256++/polar-normal, per-path streams via splitmix64(seed, path)";
    }

private:
    Xoshiro256pp rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace levlim
