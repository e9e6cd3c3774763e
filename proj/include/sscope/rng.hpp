#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace sscope {

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic per-replica random stream.
///
/// Normal draws use Box-Muller and always consume exactly two uniforms, so a
/// replayed stream stays aligned draw-for-draw regardless of platform or of
/// which helper produced each value. Replica streams are derived from a root
/// seed by counter, never by splitting state.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(splitmix64(seed ^ kPhi)) {}

    static RngStream for_replica(std::uint64_t root_seed, std::uint64_t replica) {
        return RngStream(splitmix64(root_seed + kPhi * (replica + 1)));
    }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal (Box-Muller, cosine branch; two uniforms per call).
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double stddev) { return stddev * normal(); }

    Eigen::VectorXd normal_vector(int dim, double stddev = 1.0) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = normal(stddev);
        return v;
    }

    /// +1 or -1 with equal probability.
    double sign() { return uniform() < 0.5 ? 1.0 : -1.0; }

private:
    static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ull;
    std::mt19937_64 gen_;
};

}  // namespace sscope
