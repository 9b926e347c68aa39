#include "rfseq/spline.hpp"

#include <cmath>
#include <sstream>

#include "rfseq/error.hpp"
#include "rfseq/format.hpp"

namespace rfseq {

namespace {

using u128 = unsigned __int128;
using namespace format;

constexpr std::array<std::string_view, kParameters> kParamNames = {
    "freq0", "phase0", "amp0", "frame0", "freq1", "phase1", "amp1", "frame1"};

u128 sign_extend_wide(std::uint64_t field)
{
    return u128(__int128(sign_extend40(field)));
}

}  // namespace

std::string_view parameter_name(Parameter p)
{
    return kParamNames[std::size_t(p)];
}

std::optional<Parameter> parameter_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kParamNames.size(); i++)
        if (kParamNames[i] == name)
            return Parameter(i);
    return std::nullopt;
}

Word256 encode(const SplineWord& w, std::optional<std::uint16_t> plut_address)
{
    if (w.duration == 0 || w.duration > kWordMask)
        throw ValidationError("spline word duration must be in [1, 2^40)");
    if (w.meta.channel >= kChannels)
        throw ValidationError("spline word channel must be < 8");
    if (w.meta.shift > kMaxShift)
        throw ValidationError("spline word shift must be <= 15");
    if (plut_address && *plut_address >= kPlutDepth)
        throw ValidationError("PLUT address must be < 1024");
    Word256 out;
    for (unsigned k = 0; k < 4; k++) {
        if (w.coeffs[k] > kWordMask)
            throw ValidationError("spline coefficient does not fit 40 bits");
        out.set(kCoeffLo + 40 * k, 40, w.coeffs[k]);
    }
    out.set(kDurationLo, 40, w.duration);
    out.set(kParamLo, kParamBits, std::uint64_t(w.meta.parameter));
    out.set_bit(kWaitTriggerBit, w.meta.wait_for_trigger);
    out.set_bit(kSyncBit, w.meta.sync);
    out.set_bit(kFeedforwardBit, w.meta.feedforward_enable);
    out.set_bit(kFrameApplyBit, w.meta.frame_mask.apply);
    out.set_bit(kFrameInvertBit, w.meta.frame_mask.invert);
    out.set_bit(kHoldBit, w.meta.hold);
    out.set(kShiftLo, kShiftBits, w.meta.shift);
    out.set(kChannelLo, kChannelBits, w.meta.channel);
    if (plut_address) {
        out.set(kPlutAddrLo, kPlutAddrBits, *plut_address);
        out.set(kTypeLo, kTypeBits, std::uint64_t(RecordType::PlutProgram));
    }
    else {
        out.set(kTypeLo, kTypeBits, std::uint64_t(RecordType::SplineData));
    }
    return out;
}

SplineWord decode_spline(const Word256& raw)
{
    auto type = RecordType(raw.get(kTypeLo, kTypeBits));
    if (type != RecordType::SplineData && type != RecordType::PlutProgram)
        throw ValidationError("record is not a spline word");
    if (raw.any(kSplineReservedLo, kSplineReservedHi))
        throw ValidationError("spline word has reserved bits set");
    if (type == RecordType::SplineData && raw.get(kPlutAddrLo, kPlutAddrBits) != 0)
        throw ValidationError("streamed spline word carries a PLUT address");
    SplineWord w;
    for (unsigned k = 0; k < 4; k++)
        w.coeffs[k] = raw.get(kCoeffLo + 40 * k, 40);
    w.duration = raw.get(kDurationLo, 40);
    if (w.duration == 0)
        throw ValidationError("spline word duration is zero");
    w.meta.parameter = Parameter(raw.get(kParamLo, kParamBits));
    w.meta.wait_for_trigger = raw.bit(kWaitTriggerBit);
    w.meta.sync = raw.bit(kSyncBit);
    w.meta.feedforward_enable = raw.bit(kFeedforwardBit);
    w.meta.frame_mask.apply = raw.bit(kFrameApplyBit);
    w.meta.frame_mask.invert = raw.bit(kFrameInvertBit);
    w.meta.hold = raw.bit(kHoldBit);
    w.meta.shift = std::uint8_t(raw.get(kShiftLo, kShiftBits));
    w.meta.channel = std::uint8_t(raw.get(kChannelLo, kChannelBits));
    return w;
}

SplineWord constant_word(Parameter p, std::uint64_t value, std::uint64_t duration, std::uint8_t channel)
{
    SplineWord w;
    w.coeffs[0] = value & kWordMask;
    w.duration = duration;
    w.meta.parameter = p;
    w.meta.channel = channel;
    return w;
}

SplineWord hold_word(Parameter p, std::uint64_t duration, std::uint8_t channel)
{
    SplineWord w = constant_word(p, 0, duration, channel);
    w.meta.hold = true;
    return w;
}

KnotCoefficients poly_to_knot(const std::array<double, 4>& c, std::uint64_t duration)
{
    if (duration == 0)
        throw ValidationError("poly_to_knot: duration must be >= 1");
    for (double v : c)
        if (!std::isfinite(v))
            throw ValidationError("poly_to_knot: non-finite coefficient");
    using ld = long double;
    const ld n = ld(duration);
    const ld b1 = ld(c[1]) / n, b2 = ld(c[2]) / (n * n), b3 = ld(c[3]) / (n * n * n);
    const std::array<ld, 3> diffs = {b1 - b2 + b3, 2 * b2 - 6 * b3, 6 * b3};

    const ld r0 = std::round(ld(c[0]));
    if (r0 < -ld(kWordModulus / 2) || r0 >= ld(kWordModulus))
        throw OverflowError("poly_to_knot: constant term does not fit 40 bits");

    const ld limit = ld(kWordModulus / 2);
    for (int s = int(kMaxShift); s >= 0; s--) {
        KnotCoefficients out;
        out.shift = std::uint8_t(s);
        out.coeffs[0] = std::uint64_t(std::int64_t(r0)) & kWordMask;
        bool fits = true;
        for (int k = 1; k <= 3 && fits; k++) {
            ld scaled = std::round(std::ldexp(diffs[k - 1], k * s));
            if (!(scaled > -limit && scaled < limit))
                fits = false;
            else
                out.coeffs[k] = std::uint64_t(std::int64_t(scaled)) & kWordMask;
        }
        if (fits) {
            // Nothing to gain from a shift when only the constant is used.
            if (out.coeffs[1] == 0 && out.coeffs[2] == 0 && out.coeffs[3] == 0)
                out.shift = 0;
            return out;
        }
    }
    std::ostringstream os;
    os << "poly_to_knot: slope/curvature terms exceed the 40-bit coefficient range (c1=" << c[1]
       << ", c2=" << c[2] << ", c3=" << c[3] << ", duration=" << duration << ")";
    throw OverflowError(os.str());
}

double interpolation_error_bound(unsigned shift, std::uint64_t n)
{
    const double x = double(n);
    const double q = std::ldexp(1.0, -int(shift));
    const double field = 0.5 + 1e-6;
    double err = 0.5;  // u0 rounding
    err += field * x * q;
    err += field * x * (x + 1) / 2 * q * q;
    err += field * x * (x + 1) * (x + 2) / 6 * q * q * q;
    if (shift > 0)
        err += 0.5;  // output rounding of the fractional accumulator
    return err;
}

bool SplineEngine::push(const SplineWord& w)
{
    if (fifo_full())
        return false;
    fifo_.push_back(w);
    return true;
}

void SplineEngine::load(const SplineWord& w)
{
    meta_ = w.meta;
    remaining_ = w.duration;
    hold_ = w.meta.hold;
    if (hold_)
        return;
    const unsigned s = w.meta.shift;
    frac_bits_ = 3 * s;
    mask_ = (u128(1) << (kWordBits + frac_bits_)) - 1;
    for (unsigned k = 0; k < 4; k++)
        acc_[k] = (sign_extend_wide(w.coeffs[k]) << ((3 - k) * s)) & mask_;
    if (frac_bits_ > 0)
        acc_[0] = (acc_[0] + (u128(1) << (frac_bits_ - 1))) & mask_;
}

SplineEngine::Output SplineEngine::step(std::uint64_t cycle, int channel, int param)
{
    Output out;
    if (awaiting_) {
        out.value = value_;
        return out;
    }
    if (remaining_ == 0) {
        if (!pending_) {
            if (fifo_.empty()) {
                if (!closed_) {
                    std::ostringstream os;
                    os << "FIFO underflow at cycle " << cycle;
                    if (channel >= 0)
                        os << " on channel " << channel;
                    if (param >= 0)
                        os << " parameter " << parameter_name(Parameter(param));
                    throw SimulationFault(cycle, channel, param, os.str());
                }
                if (idle_ == IdlePolicy::Zero)
                    value_ = 0;
                out.value = value_;
                return out;
            }
            pending_ = fifo_.front();
            fifo_.pop_front();
            if (pending_->meta.wait_for_trigger && !armed_) {
                awaiting_ = true;
                out.value = value_;
                return out;
            }
        }
        load(*pending_);
        pending_.reset();
        armed_ = false;
        out.word_started = true;
    }
    if (hold_) {
        out.value = value_;
    }
    else {
        out.value = std::uint64_t(acc_[0] >> frac_bits_) & kWordMask;
        acc_[2] = (acc_[2] + acc_[3]) & mask_;
        acc_[1] = (acc_[1] + acc_[2]) & mask_;
        acc_[0] = (acc_[0] + acc_[1]) & mask_;
    }
    value_ = out.value;
    out.meta = meta_;
    if (--remaining_ == 0)
        out.word_finished = true;
    return out;
}

void SplineEngine::trigger()
{
    if (!awaiting_)
        return;
    if (!pending_ && fifo_.empty())
        return;
    awaiting_ = false;
    armed_ = true;
}

std::uint64_t evaluate_word(const SplineWord& w, std::uint64_t n)
{
    SplineEngine e;
    SplineWord copy = w;
    copy.meta.wait_for_trigger = false;
    copy.meta.hold = false;
    e.push(copy);
    e.close_input();
    e.trigger();
    std::uint64_t v = 0;
    for (std::uint64_t i = 0; i <= n; i++)
        v = e.step().value;
    return v;
}

}  // namespace rfseq
