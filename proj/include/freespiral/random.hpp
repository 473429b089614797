#pragma once

#include <array>
#include <cstdint>

namespace freespiral {

/// Philox-4x32-10 counter-based generator. The output depends only on
/// (key, counter), so any sample can be drawn independently of the others.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeylA;
                key[1] += kWeylB;
            }
            const std::uint64_t p0 = std::uint64_t{kMulA} * counter[0];
            const std::uint64_t p1 = std::uint64_t{kMulB} * counter[2];
            counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(p1),
                       static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(p0)};
        }
        return counter;
    }

private:
    static constexpr std::uint32_t kMulA = 0xD2511F53;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85;
};

inline double to_unit_interval(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
}

/// Block `block` of sample `index` in stream `stream` for a given seed.
inline Philox4x32::Block draw_block(std::uint64_t seed, std::uint32_t stream, std::uint64_t index,
                                    std::uint32_t block = 0) {
    const Philox4x32::Block counter{static_cast<std::uint32_t>(index),
                                    static_cast<std::uint32_t>(index >> 32), stream, block};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Philox4x32::generate(counter, key);
}

/// Two uniforms in [0, 1) built from one Philox block.
inline std::array<double, 2> uniform_pair(const Philox4x32::Block& b) {
    return {to_unit_interval(b[0], b[1]), to_unit_interval(b[2], b[3])};
}

}  // namespace freespiral
