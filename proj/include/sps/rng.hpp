// Deterministic random number helpers.  std::mt19937_64 with hand-rolled
// uniform/normal transforms so streams are identical across standard-library
// implementations (std::uniform_real_distribution is not portable bit-for-bit).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sps {

/// Seeded generator producing reproducible uniform and normal deviates.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform deviate in [0, 1) with 53 random bits.
    double uniform() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

    /// Uniform deviate in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal deviate (Box-Muller, cached spare).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Raw 64-bit draw.
    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sps
