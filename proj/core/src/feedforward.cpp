#include "rfseq/feedforward.hpp"

#include <algorithm>
#include <sstream>

#include "rfseq/error.hpp"

namespace rfseq {

double feedforward_correction(double measured_drift_hz, const FeedforwardConfig& cfg, int sign)
{
    if (cfg.monitor_harmonic == 0)
        throw ValidationError("feed-forward monitor harmonic must be nonzero");
    if (sign != 1 && sign != -1)
        throw ValidationError("feed-forward sign must be +1 or -1");
    return sign * (measured_drift_hz * double(cfg.target_harmonic)) / double(cfg.monitor_harmonic);
}

std::int64_t correction_counts(double correction_hz)
{
    return offset_counts_rounded(0, -correction_hz);
}

std::vector<ToneFeedforward> route_feedforward(const RamanGroup& g)
{
    if (g.sign != 1 && g.sign != -1)
        throw ValidationError("feed-forward sign must be +1 or -1");
    std::vector<ToneFeedforward> out;
    for (const auto& t : g.tones)
        out.push_back({t, false, g.sign});

    switch (g.role) {
    case RamanRole::SingleQubit: {
        if (g.tones.size() != 2)
            throw ValidationError("a single-qubit Raman pair needs exactly two tones");
        if (g.tones[0].freq_hz == g.tones[1].freq_hz)
            throw ValidationError("Raman pair legs have equal frequencies; the upper leg is ambiguous");
        out[g.tones[0].freq_hz > g.tones[1].freq_hz ? 0 : 1].enabled = true;
        break;
    }
    case RamanRole::MsSidebandsUpper:
    case RamanRole::MsSidebandsLower: {
        if (g.tones.size() != 3)
            throw ValidationError("an MS Raman group needs the global beam and two sideband tones");
        const bool upper = g.role == RamanRole::MsSidebandsUpper;
        for (int i = 1; i <= 2; i++) {
            double d = g.tones[i].freq_hz - g.tones[0].freq_hz;
            if (d == 0 || (d > 0) != upper) {
                std::ostringstream os;
                os << "MS sideband tone " << i << " (" << g.tones[i].freq_hz << " Hz) is not "
                   << (upper ? "above" : "below") << " the global beam (" << g.tones[0].freq_hz << " Hz)";
                throw ValidationError(os.str());
            }
        }
        if (upper) {
            out[1].enabled = true;
            out[2].enabled = true;
        }
        else {
            out[0].enabled = true;
        }
        break;
    }
    }
    return out;
}

std::vector<std::string> lint_feedforward(const RamanGroup& g, const std::vector<bool>& enabled)
{
    std::vector<std::string> issues;
    if (enabled.size() != g.tones.size()) {
        issues.push_back("feed-forward flags do not match the tones of the Raman group");
        return issues;
    }
    std::vector<ToneFeedforward> want;
    try {
        want = route_feedforward(g);
    }
    catch (const ValidationError& e) {
        issues.push_back(e.what());
        return issues;
    }
    if (g.role == RamanRole::SingleQubit && std::count(enabled.begin(), enabled.end(), true) != 1)
        issues.push_back("exactly one tone of a Raman pair must carry the feed-forward correction");
    for (std::size_t i = 0; i < want.size(); i++) {
        if (want[i].enabled == enabled[i])
            continue;
        std::ostringstream os;
        os << "channel " << want[i].tone.channel << " tone " << want[i].tone.tone << " ("
           << want[i].tone.freq_hz << " Hz) should " << (want[i].enabled ? "" : "not ")
           << "have feed-forward enabled";
        issues.push_back(os.str());
    }
    return issues;
}

TrackingFilter::TrackingFilter(double alpha) : alpha_(alpha)
{
    if (!(alpha > 0 && alpha <= 1))
        throw ValidationError("tracking filter alpha must be in (0, 1]");
}

double TrackingFilter::update(double measurement)
{
    y_ += alpha_ * (measurement - y_);
    return y_;
}

long double two_photon_detuning(const TwoPhotonSetup& s, double rep_drift_hz, std::int64_t counts)
{
    using ld = long double;
    const ld feps = ld(kFepsNumerator) / ld(std::uint64_t(1) << kFepsShift);
    const ld upper = (ld(s.upper.value) + ld(s.sign) * ld(counts)) * feps;
    const ld lower = ld(s.lower.value) * feps;
    const ld comb = ld(s.harmonic) * ld(s.rep_rate_hz) - ld(s.qubit_hz);
    return comb + ld(s.harmonic) * ld(rep_drift_hz) + upper - lower;
}

}  // namespace rfseq
