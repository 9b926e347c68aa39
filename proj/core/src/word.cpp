#include "rfseq/word.hpp"

namespace rfseq {

void Word256::to_bytes(std::span<std::uint8_t, kBytes> out) const
{
    for (std::size_t i = 0; i < kBytes; i++)
        out[i] = std::uint8_t(limbs_[i / 8] >> (8 * (i % 8)));
}

Word256 Word256::from_bytes(std::span<const std::uint8_t, kBytes> in)
{
    Word256 w;
    for (std::size_t i = 0; i < kBytes; i++)
        w.limbs_[i / 8] |= std::uint64_t(in[i]) << (8 * (i % 8));
    return w;
}

}  // namespace rfseq
