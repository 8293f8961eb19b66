#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace insider {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Stream layout used throughout the library: the 64-bit run seed is the key
// (low word first); the 128-bit counter is (block_lo, block_hi, stream_lo,
// stream_hi), where the stream id is the path index and the block index
// counts 128-bit draws within that path. Any path can therefore be
// regenerated on its own, on any worker, without touching other paths.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * counter[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * counter[2];
            counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(p1),
                       static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(p0)};
        }
        return counter;
    }
};

// Standard normal variates for one (seed, stream) pair. Each counter block
// yields two 53-bit uniforms in (0, 1), turned into two normals by
// Box-Muller.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const auto out = Philox4x32::generate(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_,
             stream_hi_},
            key_);
        ++block_;
        const double u1 = to_unit((std::uint64_t{out[0]} << 32) | out[1]);
        const double u2 = to_unit((std::uint64_t{out[2]} << 32) | out[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static double to_unit(std::uint64_t bits) {
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace insider
