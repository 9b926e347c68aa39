#include "rfseq/dds.hpp"

#include <cmath>
#include <vector>

namespace rfseq {

namespace {

const std::vector<std::int16_t>& quarter_table()
{
    static const std::vector<std::int16_t> table = [] {
        constexpr std::size_t n = std::size_t(1) << kSineTableBits;
        std::vector<std::int16_t> t(n);
        for (std::size_t i = 0; i < n; i++) {
            // Bin centers make the table symmetric under i -> n - 1 - i.
            double x = (double(i) + 0.5) / double(n) * (std::numbers::pi / 2);
            t[i] = std::int16_t(std::lround(std::sin(x) * AmpWord::kFullScale));
        }
        return t;
    }();
    return table;
}

// amp * q15 / full scale, rounded half away from zero.
std::int32_t scale(std::int32_t amp, std::int32_t q15)
{
    const std::int32_t p = amp * q15;
    const std::int32_t half = AmpWord::kFullScale / 2;
    return p >= 0 ? (p + half) / AmpWord::kFullScale : -((-p + half) / AmpWord::kFullScale);
}

}  // namespace

std::int32_t sine_lookup_q15(PhaseWord phase)
{
    const auto& table = quarter_table();
    constexpr unsigned index_shift = kWordBits - 2 - kSineTableBits;
    constexpr std::uint64_t index_mask = (std::uint64_t(1) << kSineTableBits) - 1;
    unsigned quadrant = unsigned(phase.value >> (kWordBits - 2));
    auto index = std::size_t((phase.value >> index_shift) & index_mask);
    if (quadrant & 1)
        index = index_mask - index;
    std::int32_t v = table[index];
    return (quadrant & 2) ? -v : v;
}

double sine_lookup(PhaseWord phase)
{
    return double(sine_lookup_q15(phase)) / AmpWord::kFullScale;
}

PhaseWord total_phase(const ToneState& tone)
{
    return tone.phase_acc + tone.phase_offset + tone.frame_acc;
}

FreqWord effective_frequency(const ToneState& tone, std::int64_t feedforward_counts)
{
    if (!tone.feedforward_enabled)
        return tone.freq;
    return FreqWord(tone.freq.value + std::uint64_t(tone.feedforward_sign * feedforward_counts));
}

std::array<DdsSample, kTonesPerChannel> step(ChannelState& channel)
{
    constexpr PhaseWord quarter(kWordModulus / 4);
    std::array<DdsSample, kTonesPerChannel> out;
    for (int k = 0; k < kTonesPerChannel; k++) {
        auto& tone = channel.tones[k];
        PhaseWord phase = total_phase(tone);
        out[k].phase_total = phase;
        out[k].value = scale(tone.amp.value, sine_lookup_q15(phase));
        out[k].quadrature = scale(tone.amp.value, sine_lookup_q15(phase + quarter));
        tone.phase_acc += PhaseWord(effective_frequency(tone, channel.feedforward_counts).value);
    }
    return out;
}

void sync_pulse(ToneState& tone, const GlobalCounter& counter, std::int64_t feedforward_counts)
{
    // Multiplication modulo 2^64 is exact modulo 2^40.
    tone.phase_acc = PhaseWord(effective_frequency(tone, feedforward_counts).value * counter.t);
}

void apply_frame_rotation(ToneState& tone, PhaseWord delta, FrameMask mask)
{
    if (!mask.apply)
        return;
    tone.frame_acc += mask.invert ? -delta : delta;
}

void apply_frame_rotation(ChannelState& channel, PhaseWord delta,
                          const std::array<FrameMask, kTonesPerChannel>& masks)
{
    for (int k = 0; k < kTonesPerChannel; k++)
        apply_frame_rotation(channel.tones[k], delta, masks[k]);
}

}  // namespace rfseq
