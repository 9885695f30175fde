#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "sarmoco/geometry.hpp"
#include "sarmoco/signal_sim.hpp"

namespace sarmoco::test {

inline constexpr double kPi = 3.14159265358979323846;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
    }
    Vec3 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
    std::complex<double> unit_phasor() { return std::polar(1.0, uniform(-kPi, kPi)); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Radar whose range window covers [r_min, r_max].
inline RadarConfig window(double r_min, double r_max, double pri = 1e-3) {
    RadarConfig r;
    r.first_bin_range = r_min;
    r.num_bins = std::size_t((r_max - r_min) / r.bin_spacing) + 1;
    r.pri = pri;
    return r;
}

inline Scene single(const Vec3& p, std::complex<double> alpha = {1.0, 0.0}) {
    Scene s;
    s.scatterers.push_back({p, alpha, {}});
    return s;
}

}  // namespace sarmoco::test
