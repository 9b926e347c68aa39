#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace rfseq {

/// 256-bit transfer unit. Bit 0 is the least significant bit of limb 0;
/// the byte serialization is little-endian (byte 0 holds bits 0..7).
class Word256 {
public:
    static constexpr unsigned kBits = 256;
    static constexpr std::size_t kBytes = 32;

    constexpr Word256() = default;

    /// Reads `width` (<= 64) bits starting at bit `lo`.
    constexpr std::uint64_t get(unsigned lo, unsigned width) const
    {
        std::uint64_t out = 0;
        unsigned limb = lo / 64, shift = lo % 64;
        out = limbs_[limb] >> shift;
        if (shift != 0 && shift + width > 64 && limb + 1 < 4)
            out |= limbs_[limb + 1] << (64 - shift);
        return width >= 64 ? out : out & ((std::uint64_t(1) << width) - 1);
    }

    /// Writes the low `width` (<= 64) bits of `value` at bit `lo`.
    constexpr void set(unsigned lo, unsigned width, std::uint64_t value)
    {
        const std::uint64_t mask = width >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << width) - 1;
        value &= mask;
        unsigned limb = lo / 64, shift = lo % 64;
        limbs_[limb] = (limbs_[limb] & ~(mask << shift)) | (value << shift);
        if (shift != 0 && shift + width > 64 && limb + 1 < 4) {
            unsigned spill = 64 - shift;
            limbs_[limb + 1] = (limbs_[limb + 1] & ~(mask >> spill)) | (value >> spill);
        }
    }

    constexpr bool bit(unsigned pos) const { return get(pos, 1) != 0; }
    constexpr void set_bit(unsigned pos, bool v) { set(pos, 1, v ? 1 : 0); }

    /// True if any bit in [lo, hi] (inclusive) is set.
    constexpr bool any(unsigned lo, unsigned hi) const
    {
        for (unsigned p = lo; p <= hi; p += 64) {
            unsigned w = hi - p + 1 < 64 ? hi - p + 1 : 64;
            if (get(p, w))
                return true;
        }
        return false;
    }

    constexpr const std::array<std::uint64_t, 4>& limbs() const { return limbs_; }

    void to_bytes(std::span<std::uint8_t, kBytes> out) const;
    static Word256 from_bytes(std::span<const std::uint8_t, kBytes> in);

    friend constexpr bool operator==(const Word256&, const Word256&) = default;
    friend constexpr auto operator<=>(const Word256&, const Word256&) = default;

private:
    std::array<std::uint64_t, 4> limbs_{};
};

struct Word256Hash {
    std::size_t operator()(const Word256& w) const noexcept
    {
        std::size_t h = 0xcbf29ce484222325ull;
        for (auto l : w.limbs())
            h = (h ^ std::hash<std::uint64_t>{}(l)) * 0x100000001b3ull;
        return h;
    }
};

}  // namespace rfseq
