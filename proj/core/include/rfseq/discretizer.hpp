#pragma once

// Conversions between physical quantities and the 40-bit fixed-point words
// used throughout the DDS datapath.
//
// Frequencies are in units of f_eps = f_s / 2^40 where f_s = 819.2 MHz is the
// DDS sample rate. Because f_s = 2^18 * 3125 Hz, one count is exactly
// 3125 / 2^22 Hz, which lets every conversion below be done exactly.

#include <cstdint>
#include <numbers>

namespace rfseq {

inline constexpr unsigned kWordBits = 40;
inline constexpr std::uint64_t kWordModulus = std::uint64_t(1) << kWordBits;
inline constexpr std::uint64_t kWordMask = kWordModulus - 1;

/// DDS sample rate in Hz.
inline constexpr std::uint64_t kSampleRateHz = 819'200'000;
/// Sequencer / spline-engine clock in Hz (one cycle = two DDS samples).
inline constexpr std::uint64_t kSequencerClockHz = 409'600'000;
inline constexpr unsigned kSamplesPerCycle = 2;
/// f_eps numerator/denominator: one frequency count is 3125 / 2^22 Hz.
inline constexpr std::uint64_t kFepsNumerator = 3125;
inline constexpr unsigned kFepsShift = 22;
inline constexpr double kFepsHz = double(kFepsNumerator) / double(std::uint64_t(1) << kFepsShift);

/// Sign-extends the low 40 bits of `v`.
constexpr std::int64_t sign_extend40(std::uint64_t v)
{
    v &= kWordMask;
    return (v & (kWordModulus >> 1)) ? std::int64_t(v) - std::int64_t(kWordModulus) : std::int64_t(v);
}

struct FreqWord {
    std::uint64_t value = 0;

    constexpr FreqWord() = default;
    constexpr explicit FreqWord(std::uint64_t v) : value(v & kWordMask) {}
    friend constexpr auto operator<=>(const FreqWord&, const FreqWord&) = default;
};

/// Phase in units of turns / 2^40. Arithmetic wraps modulo 2^40.
struct PhaseWord {
    std::uint64_t value = 0;

    constexpr PhaseWord() = default;
    constexpr explicit PhaseWord(std::uint64_t v) : value(v & kWordMask) {}

    constexpr PhaseWord operator+(PhaseWord o) const { return PhaseWord(value + o.value); }
    constexpr PhaseWord operator-(PhaseWord o) const { return PhaseWord(value - o.value); }
    constexpr PhaseWord operator-() const { return PhaseWord(0 - value); }
    constexpr PhaseWord& operator+=(PhaseWord o) { return *this = *this + o; }
    constexpr PhaseWord& operator-=(PhaseWord o) { return *this = *this - o; }

    /// Turns in [0, 1).
    constexpr double turns() const { return double(value) / double(kWordModulus); }
    /// Turns in [-0.5, 0.5).
    constexpr double signed_turns() const { return double(sign_extend40(value)) / double(kWordModulus); }
    constexpr double radians() const { return signed_turns() * 2 * std::numbers::pi; }

    friend constexpr auto operator<=>(const PhaseWord&, const PhaseWord&) = default;
};

/// 16-bit signed amplitude; full scale is +/-(2^15 - 1).
struct AmpWord {
    static constexpr std::int32_t kFullScale = (1 << 15) - 1;
    std::int16_t value = 0;

    constexpr AmpWord() = default;
    constexpr explicit AmpWord(std::int16_t v) : value(v) {}

    constexpr double fraction() const { return double(value) / kFullScale; }
    /// The 40-bit zero-padded carrier representation (amplitude in the top 16 bits).
    constexpr std::uint64_t padded() const { return (std::uint64_t(std::int64_t(value)) << 24) & kWordMask; }
    static constexpr AmpWord from_padded(std::uint64_t w) { return AmpWord(std::int16_t(sign_extend40(w) >> 24)); }

    friend constexpr auto operator<=>(const AmpWord&, const AmpWord&) = default;
};

struct MsTriplet {
    FreqWord carrier;
    FreqWord red;
    FreqWord blue;
};

struct MsAlignment {
    bool aligned = false;
    /// 2*carrier - (red + blue), in f_eps counts.
    std::int64_t epsilon_mismatch = 0;
};

/// round(nu / f_s * 2^40), ties away from zero. Requires 0 <= nu < f_s/2;
/// throws OutOfBandError otherwise (including NaN).
FreqWord freq_to_word(double nu_hz);

/// Exact: w * f_s / 2^40 is representable in a double for every 40-bit w.
double word_to_freq(FreqWord w);

/// The exact (unrounded) number of f_eps counts in `hz`, rounded half away
/// from zero after subtracting it from `base` counts. Used where a word has to
/// be offset by a physical quantity without an intermediate rounding step.
std::int64_t offset_counts_rounded(std::int64_t base, double hz);

MsAlignment validate_ms_triplet(const MsTriplet& t);

/// red = freq_to_word(carrier - offset); blue = 2*carrier - red.
/// Throws OutOfBandError if either sideband falls outside [0, f_s/2].
MsTriplet fix_ms_triplet(FreqWord carrier, double sideband_offset_hz);

/// Hyperfine clock-transition frequency in Hz for a field of `gauss`.
/// Throws ValidationError for negative or non-finite fields.
double qubit_frequency(double gauss);

inline constexpr double kQubitZeroFieldHz = 12.642812118466e9;
inline constexpr double kQuadraticZeemanHzPerGauss2 = 310.8;

PhaseWord phase_from_turns(double turns);
PhaseWord phase_from_radians(double radians);
/// Nearest amplitude word for a fraction of full scale in [-1, 1].
AmpWord amp_from_fraction(double fraction);

}  // namespace rfseq
