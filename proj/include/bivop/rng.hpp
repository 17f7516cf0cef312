#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace bivop {

/// Deterministic random stream keyed by a 64-bit seed and a path of
/// counters (cell index, trial index, ...).  Every stream is derived from
/// std::seed_seq over the split seed words and the counters, so two streams
/// with the same key always produce the same sequence and streams for
/// different keys are independent of evaluation order.
class Stream {
public:
    explicit Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {})
        : engine_(make_engine(seed, std::vector<std::uint64_t>(path))) {}

    Stream(std::uint64_t seed, const std::vector<std::uint64_t>& path)
        : engine_(make_engine(seed, path)) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    /// Standard complex Gaussian: E|z|^2 = 1.
    std::complex<double> complex_normal() {
        constexpr double half = 0.70710678118654752440;
        const double re = normal();
        const double im = normal();
        return {half * re, half * im};
    }

    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::mt19937_64 make_engine(std::uint64_t seed, const std::vector<std::uint64_t>& path) {
        std::vector<std::uint32_t> words;
        words.reserve(2 + 2 * path.size() + 1);
        auto push = [&words](std::uint64_t v) {
            words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
            words.push_back(static_cast<std::uint32_t>(v >> 32));
        };
        push(seed);
        words.push_back(static_cast<std::uint32_t>(path.size()));
        for (auto p : path) push(p);
        std::seed_seq seq(words.begin(), words.end());
        return std::mt19937_64(seq);
    }

    std::mt19937_64 engine_;
};

}  // namespace bivop
