#pragma once

// Cycle model of one dual-tone DDS channel with global phase synchronization.
//
// Per sample, in this order:
//   1. the output is computed from the current (pre-increment) total phase
//      phase_acc + phase_offset + frame_acc;
//   2. phase_acc advances by the effective frequency word (mod 2^40).
// A sync pulse overwrites phase_acc with freq * t from the global counter, so
// a tone synced at sample t produces the same phase at sample t + k as a tone
// that had been running at that frequency since t = 0.

#include <array>
#include <cstdint>
#include <numbers>

#include "rfseq/discretizer.hpp"

namespace rfseq {

inline constexpr int kTonesPerChannel = 2;
inline constexpr int kChannels = 8;

/// Free-running 40-bit sample counter shared by every DDS.
struct GlobalCounter {
    std::uint64_t t = 0;

    constexpr void advance(std::uint64_t n = 1) { t = (t + n) & kWordMask; }
};

struct FrameMask {
    bool apply = false;
    bool invert = false;

    friend constexpr bool operator==(const FrameMask&, const FrameMask&) = default;
};

struct ToneState {
    FreqWord freq;
    PhaseWord phase_acc;
    PhaseWord phase_offset;
    AmpWord amp;
    PhaseWord frame_acc;
    FrameMask frame_mask;
    bool feedforward_enabled = false;
    int feedforward_sign = +1;
};

struct DdsSample {
    /// amp * sin(total phase), in amplitude LSBs.
    std::int32_t value = 0;
    /// amp * cos(total phase), used to form the complex envelope.
    std::int32_t quadrature = 0;
    PhaseWord phase_total;
};

struct ChannelState {
    std::array<ToneState, kTonesPerChannel> tones;
    /// Current feed-forward correction in f_eps counts, applied with each
    /// tone's sign when that tone has feed-forward enabled.
    std::int64_t feedforward_counts = 0;
};

/// Sine LUT geometry: a 2^16-entry quarter-wave table sampled at bin centers
/// and quantized to Q1.15. The maximum error against the ideal sine is the
/// phase-truncation term plus half an output LSB.
inline constexpr unsigned kSineTableBits = 16;
inline constexpr double kSinePhaseErrorBound = std::numbers::pi / double(1u << (kSineTableBits + 2));
inline constexpr double kSineErrorBound = kSinePhaseErrorBound + 0.5 / AmpWord::kFullScale;

/// Q1.15 sine of `phase` (full scale is AmpWord::kFullScale).
std::int32_t sine_lookup_q15(PhaseWord phase);
/// sine_lookup_q15 as a fraction in [-1, 1].
double sine_lookup(PhaseWord phase);

PhaseWord total_phase(const ToneState& tone);
FreqWord effective_frequency(const ToneState& tone, std::int64_t feedforward_counts);

/// Emits one sample per tone from the pre-increment phase, then advances the
/// accumulators. The caller advances the global counter.
std::array<DdsSample, kTonesPerChannel> step(ChannelState& channel);

/// Overwrites the accumulator with (effective freq * t) mod 2^40.
void sync_pulse(ToneState& tone, const GlobalCounter& counter, std::int64_t feedforward_counts = 0);

/// Adds +delta (or -delta when inverted) to the frame accumulator of every
/// tone whose mask has `apply` set. The phase accumulators are not touched.
void apply_frame_rotation(ChannelState& channel, PhaseWord delta,
                          const std::array<FrameMask, kTonesPerChannel>& masks);

/// Single-tone variant used by the sequencer when a frame word completes.
void apply_frame_rotation(ToneState& tone, PhaseWord delta, FrameMask mask);

}  // namespace rfseq
