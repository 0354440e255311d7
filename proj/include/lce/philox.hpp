#pragma once

// Counter-based random numbers for reproducible parallel ensembles.
//
// Philox4x32-10 (Salmon et al., SC'11) maps a 128-bit counter and a 64-bit
// key to 128 random bits with no internal state, so each trajectory owns an
// independent substream addressed by (master_seed, trajectory_index, block).
// Results therefore do not depend on which worker runs which trajectory.

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace lce {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) {
    constexpr std::uint32_t mul0 = 0xD2511F53u;
    constexpr std::uint32_t mul1 = 0xCD9E8D57u;
    constexpr std::uint32_t weyl0 = 0x9E3779B9u;
    constexpr std::uint32_t weyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{mul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{mul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += weyl0;
        key[1] += weyl1;
    }
    return ctr;
}

namespace detail {

// Layer tables for the 128-layer normal ziggurat (Marsaglia & Tsang 2000, in
// Doornik's 2005 formulation, which keeps the layer index and the uniform
// independent).
struct ZigguratTables {
    static constexpr int layers = 128;
    static constexpr double r = 3.442619855899;
    static constexpr double v = 9.91256303526217e-3;

    std::array<double, layers + 1> x{};
    std::array<double, layers> ratio{};

    ZigguratTables() {
        double f = std::exp(-0.5 * r * r);
        x[0] = v / f;
        x[1] = r;
        x[layers] = 0.0;
        for (int i = 2; i < layers; ++i) {
            x[i] = std::sqrt(-2.0 * std::log(v / x[i - 1] + f));
            f = std::exp(-0.5 * x[i] * x[i]);
        }
        for (int i = 0; i < layers; ++i) ratio[i] = x[i + 1] / x[i];
    }

    static const ZigguratTables& get() {
        static const ZigguratTables tables;
        return tables;
    }
};

}  // namespace detail

/// Standard-normal stream for one trajectory.
///
/// Raw bits come from consecutive Philox blocks addressed by
/// (stream_id, block counter) under the key master_seed; each block yields two
/// 64-bit words. Normals are drawn with the ziggurat method: one word per
/// variate on the fast path (about 98.8% of draws), extra words for wedge and
/// tail rejections. The scheme is fixed, so a (seed, stream) pair always
/// produces the same sequence.
class GaussianStream {
public:
    GaussianStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)),
          zig_(detail::ZigguratTables::get()) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto blk = philox4x32_10(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
            key_);
        ++block_;
        spare_ = std::uint64_t{blk[3]} << 32 | blk[2];
        have_spare_ = true;
        return std::uint64_t{blk[1]} << 32 | blk[0];
    }

    /// Uniform in (0, 1), never exactly 0 or 1.
    double next_open_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double next_normal() {
        for (;;) {
            const std::uint64_t w = next_u64();
            const auto layer = static_cast<int>(w & 0x7F);
            const double u = (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-52 - 1.0;
            if (std::abs(u) < zig_.ratio[layer]) return u * zig_.x[layer];
            if (layer == 0) return tail(u < 0.0);
            const double x = u * zig_.x[layer];
            const double f0 = std::exp(-0.5 * (zig_.x[layer] * zig_.x[layer] - x * x));
            const double f1 = std::exp(-0.5 * (zig_.x[layer + 1] * zig_.x[layer + 1] - x * x));
            if (f1 + next_open_unit() * (f0 - f1) < 1.0) return x;
        }
    }

    /// Next pair of independent N(0, 1) variates.
    std::pair<double, double> next_pair() {
        const double a = next_normal();
        const double b = next_normal();
        return {a, b};
    }

    std::uint64_t blocks_used() const { return block_; }

private:
    double tail(bool negative) {
        constexpr double r = detail::ZigguratTables::r;
        double x = 0.0, y = 0.0;
        do {
            x = std::log(next_open_unit()) / r;
            y = std::log(next_open_unit());
        } while (-2.0 * y < x * x);
        return negative ? x - r : r - x;
    }

    Philox4x32Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    const detail::ZigguratTables& zig_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace lce
