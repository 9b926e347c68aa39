#include "rfseq/discretizer.hpp"

#include <cmath>
#include <sstream>

#include "rfseq/error.hpp"

namespace rfseq {

namespace {

using i128 = __int128;

// Exact rational for `hz` expressed in f_eps counts: sign * num / den.
struct Counts {
    int sign = 1;
    i128 num = 0;
    i128 den = 1;
};

Counts exact_counts(double hz)
{
    Counts c;
    if (hz == 0)
        return c;
    c.sign = hz < 0 ? -1 : 1;
    int exp = 0;
    double frac = std::frexp(std::fabs(hz), &exp);
    auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
    // hz = mant * 2^(exp - 53); counts = hz * 2^22 / 3125.
    int k = exp - 53 + int(kFepsShift);
    if (k >= 0) {
        c.num = i128(mant) << k;
        c.den = kFepsNumerator;
    }
    else if (k > -70) {
        c.num = mant;
        c.den = i128(kFepsNumerator) << (-k);
    }
    else {
        // Below 2^-17 counts: cannot move any rounding decision.
        c.num = 0;
    }
    return c;
}

i128 round_half_away(i128 p, i128 q)
{
    if (p >= 0)
        return (2 * p + q) / (2 * q);
    return -((-2 * p + q) / (2 * q));
}

[[noreturn]] void out_of_band(double hz, const char* what)
{
    std::ostringstream os;
    os.precision(17);
    os << what << ": " << hz << " Hz is outside the alias-free band [0, "
       << kSampleRateHz / 2 << ") Hz";
    throw OutOfBandError(os.str());
}

}  // namespace

FreqWord freq_to_word(double nu_hz)
{
    if (!(nu_hz >= 0) || !(nu_hz < double(kSampleRateHz / 2)))
        out_of_band(nu_hz, "freq_to_word");
    auto c = exact_counts(nu_hz);
    return FreqWord(std::uint64_t(round_half_away(c.num, c.den)));
}

double word_to_freq(FreqWord w)
{
    // w * 3125 < 2^52, so both steps are exact.
    return std::ldexp(double(w.value * kFepsNumerator), -int(kFepsShift));
}

std::int64_t offset_counts_rounded(std::int64_t base, double hz)
{
    if (!std::isfinite(hz) || std::fabs(hz) >= double(kSampleRateHz))
        out_of_band(hz, "offset");
    auto c = exact_counts(hz);
    // base - sign * num / den
    i128 p = i128(base) * c.den - c.sign * c.num;
    return std::int64_t(round_half_away(p, c.den));
}

MsAlignment validate_ms_triplet(const MsTriplet& t)
{
    std::int64_t mismatch = 2 * std::int64_t(t.carrier.value) -
                            (std::int64_t(t.red.value) + std::int64_t(t.blue.value));
    return {mismatch == 0, mismatch};
}

MsTriplet fix_ms_triplet(FreqWord carrier, double sideband_offset_hz)
{
    std::int64_t red = offset_counts_rounded(std::int64_t(carrier.value), sideband_offset_hz);
    std::int64_t blue = 2 * std::int64_t(carrier.value) - red;
    const auto limit = std::int64_t(kWordModulus >> 1);
    if (red < 0 || red > limit || blue < 0 || blue > limit) {
        std::ostringstream os;
        os << "fix_ms_triplet: sideband offset " << sideband_offset_hz
           << " Hz puts a sideband outside [0, f_s/2] (red=" << red << ", blue=" << blue << ")";
        throw OutOfBandError(os.str());
    }
    return {carrier, FreqWord(std::uint64_t(red)), FreqWord(std::uint64_t(blue))};
}

double qubit_frequency(double gauss)
{
    if (!(gauss >= 0) || !std::isfinite(gauss))
        throw ValidationError("qubit_frequency: magnetic field must be a finite value >= 0 G");
    return kQubitZeroFieldHz + kQuadraticZeemanHzPerGauss2 * gauss * gauss;
}

PhaseWord phase_from_turns(double turns)
{
    double frac = turns - std::floor(turns);
    auto v = static_cast<std::uint64_t>(std::llround(std::ldexp(frac, int(kWordBits))));
    return PhaseWord(v);
}

PhaseWord phase_from_radians(double radians)
{
    return phase_from_turns(radians / (2 * std::numbers::pi));
}

AmpWord amp_from_fraction(double fraction)
{
    if (!(std::fabs(fraction) <= 1.0))
        throw ValidationError("amplitude fraction must lie in [-1, 1]");
    return AmpWord(std::int16_t(std::lround(fraction * AmpWord::kFullScale)));
}

}  // namespace rfseq
