#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace forestlab {

// splitmix64 step; used both as a generator and to derive child seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d9649669b545fbULL;
    return z ^ (z >> 31);
}

// Deterministic stream with a fixed cross-platform layout. Gaussians use
// Box-Muller rather than std::normal_distribution, whose output sequence is
// implementation defined and would break byte-identical artifacts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Warm up so nearby seeds decorrelate immediately.
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on (0,1); never returns an endpoint.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    Eigen::VectorXd normal_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // Uniform direction on the unit sphere in R^n.
    Eigen::VectorXd unit_vector(int n) {
        while (true) {
            Eigen::VectorXd v = normal_vector(n);
            double r = v.norm();
            if (r > 1e-12) return v / r;
        }
    }

    // Uniform point in the closed ball of the given radius.
    Eigen::VectorXd ball_point(int n, double radius) {
        Eigen::VectorXd dir = unit_vector(n);
        double r = radius * std::pow(uniform01(), 1.0 / n);
        return r * dir;
    }

    // Independent child stream; (seed, index) pairs never collide in practice.
    Rng child(std::uint64_t index) const {
        std::uint64_t s = state_;
        std::uint64_t mixed = splitmix64(s) ^ (0x632be59bd9b4e019ULL * (index + 1));
        return Rng(mixed);
    }

private:
    std::uint64_t state_;
};

}  // namespace forestlab
