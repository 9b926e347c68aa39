#pragma once

// Repetition-rate feed-forward. The comb's repetition rate is monitored at a
// low harmonic m (32) while the Raman transition spans harmonic n (105), so a
// measured drift d at the monitor moves the two-photon resonance by (n/m) d.
// That correction is added to (or subtracted from) exactly one leg of each
// Raman pair.

#include <cstdint>
#include <string>
#include <vector>

#include "rfseq/discretizer.hpp"

namespace rfseq {

struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    double value() const { return double(num) / double(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

struct FeedforwardConfig {
    std::int64_t target_harmonic = 105;
    std::int64_t monitor_harmonic = 32;

    Rational harmonic_scale() const { return {target_harmonic, monitor_harmonic}; }
};

/// scale * measured_drift * sign, in Hz. Throws ValidationError for a zero
/// denominator or a sign other than +/-1.
double feedforward_correction(double measured_drift_hz, const FeedforwardConfig& cfg = {}, int sign = +1);

/// Correction in f_eps counts, rounded half away from zero.
std::int64_t correction_counts(double correction_hz);

enum class RamanRole {
    /// A copropagating or counterpropagating pair driving one qubit.
    SingleQubit,
    /// MS gate with both sidebands on the upper leg; tones[0] is the global beam.
    MsSidebandsUpper,
    /// MS gate with both sidebands on the lower leg; tones[0] is the global beam.
    MsSidebandsLower,
};

struct ToneRef {
    int channel = 0;
    int tone = 0;
    double freq_hz = 0;

    friend bool operator==(const ToneRef&, const ToneRef&) = default;
};

struct RamanGroup {
    RamanRole role = RamanRole::SingleQubit;
    /// SingleQubit: two tones in any order. MS: global beam, then the two sidebands.
    std::vector<ToneRef> tones;
    /// Sign the correction is applied with on every corrected tone.
    int sign = -1;
};

struct ToneFeedforward {
    ToneRef tone;
    bool enabled = false;
    int sign = +1;
};

/// Which tones of a Raman group get the correction. Throws ValidationError on
/// equal leg frequencies or sidebands on the wrong side of the global beam.
std::vector<ToneFeedforward> route_feedforward(const RamanGroup& g);

/// Differences between the actual enable flags (parallel to g.tones) and the
/// routing rules; empty when they agree.
std::vector<std::string> lint_feedforward(const RamanGroup& g, const std::vector<bool>& enabled);

/// First-order low-pass standing in for the analog tracking loop.
class TrackingFilter {
public:
    /// alpha in (0, 1]; 1 passes measurements through.
    explicit TrackingFilter(double alpha = 1.0);
    double update(double measurement);
    double value() const { return y_; }

private:
    double alpha_;
    double y_ = 0;
};

/// Two-photon detuning of a Raman pair spanning comb harmonic n:
///   n * (f_rep + drift) + f(upper + sign*counts) - f(lower) - f_qubit,
/// evaluated in long double so that sub-f_eps residuals survive.
struct TwoPhotonSetup {
    std::int64_t harmonic = 105;
    double rep_rate_hz = 0;
    FreqWord upper;
    FreqWord lower;
    double qubit_hz = 0;
    int sign = -1;
};

long double two_photon_detuning(const TwoPhotonSetup& s, double rep_drift_hz, std::int64_t counts);

}  // namespace rfseq
