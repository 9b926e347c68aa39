#include "rfseq/crosstalk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rfseq/error.hpp"

namespace rfseq {

namespace {

using i128 = __int128;

std::int64_t round_shift(i128 v, unsigned bits)
{
    const i128 half = i128(1) << (bits - 1);
    return std::int64_t(v >= 0 ? (v + half) >> bits : -((-v + half) >> bits));
}

std::int32_t saturate(std::int64_t v)
{
    return std::int32_t(std::clamp<std::int64_t>(v, INT32_MIN, INT32_MAX));
}

}  // namespace

void validate(const XtalkConfig& cfg)
{
    for (const auto& t : cfg.taps) {
        std::ostringstream os;
        os << "crosstalk tap " << t.from << "->" << t.to << ": ";
        if (t.from < 0 || t.from >= kChannels || t.to < 0 || t.to >= kChannels)
            os << "channel out of range";
        else if (int d = std::abs(t.from - t.to); d < 1 || d > 2)
            os << "only nearest and next-nearest neighbors can be compensated";
        else if (!(t.amplitude >= 0 && t.amplitude < 1))
            os << "amplitude " << t.amplitude << " outside [0, 1)";
        else if (t.delay < kDspLatencyCycles)
            os << "delay " << t.delay << " is below the DSP latency of " << kDspLatencyCycles << " cycles";
        else if (!std::isfinite(t.phase_rad))
            os << "phase is not finite";
        else
            continue;
        throw ValidationError(os.str());
    }
}

TapCoefficient quantize_tap(double amplitude, double phase_rad)
{
    const double scale = std::ldexp(1.0, int(kTapFractionBits));
    return {std::llround(amplitude * std::cos(phase_rad) * scale),
            std::llround(amplitude * std::sin(phase_rad) * scale)};
}

CrosstalkCompensator::CrosstalkCompensator(XtalkConfig cfg) : cfg_(std::move(cfg))
{
    validate(cfg_);
    for (const auto& t : cfg_.taps) {
        coeffs_.push_back(quantize_tap(t.amplitude, t.phase_rad));
        depth_ = std::max(depth_, t.delay);
    }
    for (auto& h : history_)
        h.assign(depth_ + 1, IqSample{});
}

IqSample CrosstalkCompensator::delayed(int channel, unsigned d) const
{
    // history_[c][0] is the newest sample.
    return history_[channel][d];
}

std::array<IqSample, kChannels> CrosstalkCompensator::push(const std::array<IqSample, kChannels>& raw)
{
    for (int c = 0; c < kChannels; c++) {
        history_[c].push_front(raw[c]);
        history_[c].pop_back();
    }
    std::array<i128, kChannels> acc_i{}, acc_q{};
    for (std::size_t k = 0; k < cfg_.taps.size(); k++) {
        const auto& t = cfg_.taps[k];
        const auto& c = coeffs_[k];
        IqSample x = delayed(t.from, t.delay);
        acc_i[t.to] += i128(c.re) * x.i - i128(c.im) * x.q;
        acc_q[t.to] += i128(c.re) * x.q + i128(c.im) * x.i;
    }
    std::array<IqSample, kChannels> out{};
    for (int c = 0; c < kChannels; c++) {
        injection_[c] = {saturate(round_shift(acc_i[c], kTapFractionBits)),
                         saturate(round_shift(acc_q[c], kTapFractionBits))};
        IqSample base = delayed(c, kDspLatencyCycles);
        out[c] = {saturate(std::int64_t(base.i) + injection_[c].i),
                  saturate(std::int64_t(base.q) + injection_[c].q)};
    }
    return out;
}

std::vector<std::vector<IqSample>> apply_crosstalk_compensation(const std::vector<std::vector<IqSample>>& raw,
                                                                const XtalkConfig& cfg)
{
    if (raw.size() > std::size_t(kChannels))
        throw ValidationError("more than 8 channels of samples");
    std::size_t n = 0;
    for (const auto& ch : raw) {
        if (n != 0 && !ch.empty() && ch.size() != n)
            throw ValidationError("channel sample vectors differ in length");
        n = std::max(n, ch.size());
    }
    CrosstalkCompensator comp(cfg);
    std::vector<std::vector<IqSample>> out(raw.size(), std::vector<IqSample>(n));
    for (std::size_t k = 0; k < n; k++) {
        std::array<IqSample, kChannels> in{};
        for (std::size_t c = 0; c < raw.size(); c++)
            if (!raw[c].empty())
                in[c] = raw[c][k];
        auto o = comp.push(in);
        for (std::size_t c = 0; c < raw.size(); c++)
            out[c][k] = o[c];
    }
    return out;
}

double fine_delay_turns(FreqWord freq, double delay_cycles)
{
    if (!(delay_cycles >= 0 && delay_cycles <= 1))
        throw ValidationError("fine delay must be within one sequencer cycle");
    // f * tau = (w * f_s / 2^40) * (delay / (f_s / 2)) = 2 * w * delay / 2^40 turns
    return 2.0 * double(freq.value) * delay_cycles / double(kWordModulus);
}

PhaseWord fine_delay_as_phase(FreqWord freq, double delay_cycles)
{
    double counts = 2.0 * double(freq.value) * delay_cycles;
    if (!(delay_cycles >= 0 && delay_cycles <= 1))
        throw ValidationError("fine delay must be within one sequencer cycle");
    return PhaseWord(std::uint64_t(std::llround(counts)));
}

}  // namespace rfseq
