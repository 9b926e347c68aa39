#pragma once

// Digital crosstalk compensation on the complex (I/Q) channel envelopes, one
// sample per sequencer cycle. Each tap adds a scaled, phase-shifted and
// delayed copy of a neighbor's uncompensated output:
//
//   out[i][n] = raw[i][n - L] + sum_taps c(j->i) * raw[j][n - d]
//
// with L the DSP latency. Taps only read raw signals, so compensation never
// feeds back into itself.

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "rfseq/dds.hpp"
#include "rfseq/discretizer.hpp"

namespace rfseq {

inline constexpr unsigned kDspLatencyCycles = 4;
/// Tap coefficients are carried with this many fractional bits.
inline constexpr unsigned kTapFractionBits = 30;

struct IqSample {
    std::int32_t i = 0;
    std::int32_t q = 0;

    friend bool operator==(const IqSample&, const IqSample&) = default;
};

struct XtalkTap {
    int from = 0;  // aggressor
    int to = 0;    // victim
    double amplitude = 0;  // [0, 1)
    double phase_rad = 0;
    unsigned delay = kDspLatencyCycles;  // cycles, >= kDspLatencyCycles
};

struct XtalkConfig {
    std::vector<XtalkTap> taps;
};

/// Throws ValidationError for taps that are not nearest or next-nearest
/// neighbors, amplitudes outside [0, 1), or delays below the DSP latency.
void validate(const XtalkConfig& cfg);

/// Fixed-point complex coefficient of a tap.
struct TapCoefficient {
    std::int64_t re = 0;
    std::int64_t im = 0;
};
TapCoefficient quantize_tap(double amplitude, double phase_rad);

class CrosstalkCompensator {
public:
    explicit CrosstalkCompensator(XtalkConfig cfg);

    /// Consumes one raw sample per channel and returns the compensated ones.
    std::array<IqSample, kChannels> push(const std::array<IqSample, kChannels>& raw);
    /// The compensation (tap sum) injected on channel `c` by the last push.
    IqSample last_injection(int c) const { return injection_[c]; }

private:
    IqSample delayed(int channel, unsigned d) const;

    XtalkConfig cfg_;
    std::vector<TapCoefficient> coeffs_;
    unsigned depth_ = kDspLatencyCycles;
    std::array<std::deque<IqSample>, kChannels> history_;
    std::array<IqSample, kChannels> injection_{};
};

/// Batch form over per-channel sample vectors of equal length (missing
/// channels are treated as silent). History before the first sample is zero.
std::vector<std::vector<IqSample>> apply_crosstalk_compensation(const std::vector<std::vector<IqSample>>& raw,
                                                                const XtalkConfig& cfg);

/// Phase shift that stands in for a sub-cycle delay of a single tone: the
/// tone advances freq * delay over `delay_cycles` sequencer cycles, i.e.
/// 2 * word * delay in phase counts. Requires 0 <= delay_cycles <= 1.
PhaseWord fine_delay_as_phase(FreqWord freq, double delay_cycles);
/// The same quantity as unreduced turns.
double fine_delay_turns(FreqWord freq, double delay_cycles);

}  // namespace rfseq
