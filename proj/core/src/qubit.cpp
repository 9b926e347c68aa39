#include "rfseq/qubit.hpp"

#include <cmath>
#include <map>

#include "rfseq/error.hpp"

namespace rfseq {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kCycleSeconds = 1.0 / double(kSequencerClockHz);

double wrap(double rad)
{
    double r = std::remainder(rad, kTwoPi);
    return r == -std::numbers::pi ? std::numbers::pi : r;
}

const ChannelCycle* find_row(const Trace& trace, std::size_t first, std::size_t n, int channel)
{
    for (std::size_t i = first; i < first + n; i++)
        if (trace.rows[i].channel == channel)
            return &trace.rows[i];
    return nullptr;
}

template <class F>
void for_each_cycle(const Trace& trace, const RamanPairSpec& pair, F&& f)
{
    const std::size_t per_cycle = trace.channels.size();
    if (per_cycle == 0)
        return;
    for (std::size_t first = 0; first + per_cycle <= trace.rows.size(); first += per_cycle) {
        const auto* up = find_row(trace, first, per_cycle, pair.upper_channel);
        const auto* lo = find_row(trace, first, per_cycle, pair.lower_channel);
        if (!up || !lo)
            throw ValidationError("Raman pair refers to a channel that is not in the trace");
        f(up->cycle, up->tones[pair.upper_tone], lo->tones[pair.lower_tone]);
    }
}

}  // namespace

QubitState evolve(const QubitState& s, const DriveSegment& seg)
{
    const double vx = seg.rabi * std::cos(seg.phase);
    const double vy = seg.rabi * std::sin(seg.phase);
    const double vz = -seg.detuning;
    const double w = std::sqrt(vx * vx + vy * vy + vz * vz);
    const double half = 0.5 * w * seg.duration;

    QubitState d = s;
    if (w > 0) {
        const double c = std::cos(half);
        const cd k = cd(0, -std::sin(half) / w);
        const cd a0 = s.a0, a1 = s.a1;
        d.a0 = c * a0 + k * (vz * a0 + cd(vx, -vy) * a1);
        d.a1 = c * a1 + k * (cd(vx, vy) * a0 - vz * a1);
    }
    const double rz = 0.5 * seg.detuning * seg.duration;
    d.a0 *= std::polar(1.0, -rz);
    d.a1 *= std::polar(1.0, rz);
    return d;
}

QubitState evolve(QubitState s, std::span<const DriveSegment> segs)
{
    for (const auto& seg : segs)
        s = evolve(s, seg);
    return s;
}

PhaseWord beat_phase(const RamanTone& a, const RamanTone& b)
{
    const bool a_up = a.freq >= b.freq;
    const auto& up = a_up ? a : b;
    const auto& lo = a_up ? b : a;
    return up.phase - lo.phase;
}

DriveSegment raman_pair_to_drive(const RamanTone& a, const RamanTone& b, const RamanCalibration& cal,
                                 double duration)
{
    if (!(duration >= 0))
        throw ValidationError("drive segment duration must be >= 0");
    const bool a_up = a.freq >= b.freq;
    const auto& up = a_up ? a : b;
    const auto& lo = a_up ? b : a;
    DriveSegment seg;
    seg.phase = beat_phase(a, b).radians();
    const std::int64_t beat = std::int64_t(up.freq.value) - std::int64_t(lo.freq.value);
    seg.detuning = kTwoPi * double(beat - cal.resonance_counts) * kFepsHz;
    seg.rabi = cal.rabi_full_scale * up.amp.fraction() * lo.amp.fraction();
    seg.duration = duration;
    return seg;
}

std::vector<DriveSegment> drive_from_trace(const Trace& trace, const RamanPairSpec& pair)
{
    std::vector<DriveSegment> out;
    const auto& cal = pair.calibration;
    for_each_cycle(trace, pair, [&](std::uint64_t cycle, const ToneCycle& up, const ToneCycle& lo) {
        const std::uint64_t n = cycle * kSamplesPerCycle;
        const PhaseWord reference(std::uint64_t(cal.resonance_counts) * n);
        const std::int64_t beat = std::int64_t(up.freq.value) - std::int64_t(lo.freq.value);
        DriveSegment seg;
        seg.phase = (up.phase - lo.phase - reference).radians();
        seg.detuning = kTwoPi * double(beat - cal.resonance_counts) * kFepsHz;
        seg.rabi = cal.rabi_full_scale * up.amp.fraction() * lo.amp.fraction();
        seg.duration = kCycleSeconds;
        out.push_back(seg);
    });
    return out;
}

QubitState run_trace(const Trace& trace, const RamanPairSpec& pair)
{
    auto segs = drive_from_trace(trace, pair);
    return evolve(QubitState{}, segs);
}

PhaseSyncReport verify_phase_sync(const Trace& trace, const RamanPairSpec& pair)
{
    PhaseSyncReport r;
    std::map<std::int64_t, PhaseWord> reference;
    bool in_pulse = false;
    std::uint64_t last_cycle = 0;
    for_each_cycle(trace, pair, [&](std::uint64_t cycle, const ToneCycle& up, const ToneCycle& lo) {
        last_cycle = cycle;
        const bool on = up.amp.value != 0 && lo.amp.value != 0;
        if (!on) {
            if (in_pulse)
                r.pulses.back().end_cycle = cycle;
            in_pulse = false;
            return;
        }
        if (in_pulse)
            return;
        in_pulse = true;
        PulseAxis p;
        p.start_cycle = cycle;
        p.beat_counts = std::int64_t(up.freq.value) - std::int64_t(lo.freq.value);
        const std::uint64_t n = cycle * kSamplesPerCycle;
        const PhaseWord own(std::uint64_t(p.beat_counts) * n);
        p.axis = (up.phase - lo.phase) - own - (up.offset - lo.offset);
        auto [it, fresh] = reference.emplace(p.beat_counts, p.axis);
        p.deviation = fresh ? 0.0 : wrap((p.axis - it->second).radians());
        r.max_axis_deviation = std::max(r.max_axis_deviation, std::fabs(p.deviation));
        r.pulses.push_back(p);
    });
    if (in_pulse)
        r.pulses.back().end_cycle = last_cycle + 1;
    return r;
}

MsBeatPhase ms_beatnote_phase(PhaseWord red, PhaseWord blue, PhaseWord carrier)
{
    return {blue + red - carrier - carrier, blue - red};
}

double ms_phase_drift(const MsTriplet& t, long double samples)
{
    const long double rate = (long double)(std::int64_t(t.blue.value) + std::int64_t(t.red.value) -
                                           2 * std::int64_t(t.carrier.value));
    return double(2 * std::numbers::pi_v<long double> * rate * samples / (long double)(kWordModulus));
}

}  // namespace rfseq
