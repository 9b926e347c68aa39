#pragma once

// Two-level qubit driven by a Raman beat note, rotating-wave approximation.
//
// In the qubit frame a segment with Rabi rate W, detuning D (drive minus
// qubit) and phase p has
//     H(t) = W/2 (cos(p + D t) sx + sin(p + D t) sy),   t from segment start.
// In the frame of the drive this is time independent,
//     H' = W/2 (cos p sx + sin p sy) - D/2 sz,
// which evolve() exponentiates in closed form before rotating back.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rfseq/discretizer.hpp"
#include "rfseq/playback.hpp"

namespace rfseq {

struct QubitState {
    std::complex<double> a0{1.0, 0.0};
    std::complex<double> a1{0.0, 0.0};

    double norm() const { return std::sqrt(std::norm(a0) + std::norm(a1)); }
    double p1() const { return std::norm(a1); }
};

struct DriveSegment {
    double rabi = 0;       // rad/s
    double detuning = 0;   // rad/s
    double phase = 0;      // rad
    double duration = 0;   // s

    friend bool operator==(const DriveSegment&, const DriveSegment&) = default;
};

QubitState evolve(const QubitState& s, const DriveSegment& seg);
QubitState evolve(QubitState s, std::span<const DriveSegment> segs);

/// One Raman leg at the drive: frequency word, total phase (offset plus frame
/// accumulator plus whatever else the caller folds in) and amplitude.
struct RamanTone {
    FreqWord freq;
    PhaseWord phase;
    AmpWord amp;
};

struct RamanCalibration {
    /// Rabi rate in rad/s with both legs at full scale; scales with the
    /// product of the leg amplitudes.
    double rabi_full_scale = 0;
    /// Beat-note word (upper minus lower) that is resonant with the qubit.
    std::int64_t resonance_counts = 0;
};

/// Drive phase = phase(upper) - phase(lower), the upper leg being the one
/// with the larger frequency word (`a` on a tie). Detuning from the beat-note
/// word relative to the resonance.
DriveSegment raman_pair_to_drive(const RamanTone& a, const RamanTone& b, const RamanCalibration& cal,
                                 double duration);
/// The beat-note phase word phase(upper) - phase(lower).
PhaseWord beat_phase(const RamanTone& a, const RamanTone& b);

/// Which trace tones form the Raman pair.
struct RamanPairSpec {
    int upper_channel = 0;
    int upper_tone = 0;
    int lower_channel = 0;
    int lower_tone = 1;
    RamanCalibration calibration;
};

/// One drive segment per simulated cycle. The phase of cycle k is the beat
/// phase at its first sample, taken relative to a qubit reference advancing
/// `resonance_counts` per sample since the simulation started.
std::vector<DriveSegment> drive_from_trace(const Trace& trace, const RamanPairSpec& pair);

/// Runs drive_from_trace from |0>.
QubitState run_trace(const Trace& trace, const RamanPairSpec& pair);

struct PulseAxis {
    std::uint64_t start_cycle = 0;
    std::uint64_t end_cycle = 0;  // exclusive
    std::int64_t beat_counts = 0;
    /// Beat phase at the pulse start minus the programmed offsets, measured
    /// against a reference oscillating at the pulse's own beat frequency.
    PhaseWord axis;
    /// Wrapped difference from the first pulse at the same beat frequency, rad.
    double deviation = 0;
};

struct PhaseSyncReport {
    std::vector<PulseAxis> pulses;
    double max_axis_deviation = 0;  // rad
};

/// Splits the trace into pulses (runs of cycles where both legs have nonzero
/// amplitude) and checks that pulses at a common beat frequency rotate about
/// the same axis once their programmed phases are taken out.
PhaseSyncReport verify_phase_sync(const Trace& trace, const RamanPairSpec& pair);

struct MsBeatPhase {
    /// phase(blue) + phase(red) - 2 phase(carrier leg).
    PhaseWord sum;
    /// phase(blue) - phase(red).
    PhaseWord difference;
};

MsBeatPhase ms_beatnote_phase(PhaseWord red, PhaseWord blue, PhaseWord carrier);

/// Phase the sideband sum (blue + red - 2 carrier) drifts by after `samples`
/// DDS samples: 2 pi * (blue + red - 2 carrier) * samples / 2^40, which is
/// 2 pi * f_eps * (t - t0) per count of mismatch. Unwrapped, in radians.
double ms_phase_drift(const MsTriplet& t, long double samples);

}  // namespace rfseq
