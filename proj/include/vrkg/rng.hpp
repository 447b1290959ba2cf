#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace vrkg {

// All randomness goes through std::mt19937_64, whose output sequence is fixed by
// the standard. The distributions below are written out by hand because the
// std:: distributions are implementation-defined and would break cross-platform
// reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double unit();

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Derive an independent stream seed from a base seed and a purpose tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace vrkg
