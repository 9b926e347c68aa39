#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "rfseq/crosstalk.hpp"
#include "rfseq/error.hpp"

using namespace rfseq;

namespace {

constexpr double kDeg = std::numbers::pi / 180;

std::vector<IqSample> tone(std::size_t n, double amp, double cycles_per_sample, double phase0 = 0)
{
    std::vector<IqSample> out(n);
    for (std::size_t k = 0; k < n; k++) {
        double ph = phase0 + 2 * std::numbers::pi * cycles_per_sample * double(k);
        out[k] = {std::int32_t(std::lround(amp * std::cos(ph))), std::int32_t(std::lround(amp * std::sin(ph)))};
    }
    return out;
}

std::complex<double> cplx(IqSample s) { return {double(s.i), double(s.q)}; }

}  // namespace

TEST(Crosstalk, Validation)
{
    EXPECT_NO_THROW(validate({{{0, 1, 0.5, 0, 4}, {3, 1, 0.1, 0, 9}}}));
    EXPECT_THROW(validate({{{0, 3, 0.5, 0, 4}}}), ValidationError);
    EXPECT_THROW(validate({{{2, 2, 0.5, 0, 4}}}), ValidationError);
    EXPECT_THROW(validate({{{0, 1, 1.0, 0, 4}}}), ValidationError);
    EXPECT_THROW(validate({{{0, 1, -0.1, 0, 4}}}), ValidationError);
    EXPECT_THROW(validate({{{0, 1, 0.1, 0, 3}}}), ValidationError);
    EXPECT_THROW(validate({{{0, 8, 0.1, 0, 4}}}), ValidationError);
}

TEST(Crosstalk, LatencyMatched)
{
    XtalkConfig cfg{{{0, 1, 0.5, 0, kDspLatencyCycles}}};
    CrosstalkCompensator comp(cfg);
    for (int n = 0; n < 10; n++) {
        std::array<IqSample, kChannels> in{};
        if (n == 0) {
            in[0] = {1000, 0};
            in[1] = {0, 300};
        }
        auto out = comp.push(in);
        if (n == int(kDspLatencyCycles)) {
            EXPECT_EQ(out[1], (IqSample{500, 300}));
            EXPECT_EQ(out[0], (IqSample{1000, 0}));
        }
        else {
            EXPECT_EQ(out[1], IqSample{}) << n;
            EXPECT_EQ(out[0], IqSample{}) << n;
        }
    }
}

TEST(Crosstalk, ExactCancellation)
{
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> amp(0.001, 0.3), ph(-std::numbers::pi, std::numbers::pi);
    for (int trial = 0; trial < 50; trial++) {
        const std::complex<double> leak = std::polar(amp(rng), ph(rng));
        XtalkConfig cfg{{{2, 3, std::abs(leak), std::arg(-leak), kDspLatencyCycles}}};
        auto agg = tone(2000, 30000, 0.0123 * (trial + 1), ph(rng));
        std::vector<std::vector<IqSample>> raw(kChannels);
        raw[2] = agg;
        auto out = apply_crosstalk_compensation(raw, cfg);
        double worst = 0;
        for (std::size_t n = 0; n < agg.size(); n++) {
            // The optics add leak * (what the aggressor actually emits).
            auto seen = cplx(out[3][n]) + leak * cplx(out[2][n]);
            worst = std::max(worst, std::abs(seen));
        }
        ASSERT_LE(worst, 1.0) << trial;
    }
}

TEST(Crosstalk, NoRecursion)
{
    XtalkConfig both{{{0, 1, 0.2, 0.3, 4}, {1, 0, 0.25, -1.1, 5}}};
    auto a = tone(500, 20000, 0.031);
    auto v = tone(500, 15000, 0.017);
    std::vector<std::vector<IqSample>> raw(kChannels);
    raw[0] = a;
    raw[1] = v;
    CrosstalkCompensator with_victim(both), silent_victim(both);
    for (std::size_t n = 0; n < a.size(); n++) {
        std::array<IqSample, kChannels> x{}, y{};
        x[0] = a[n];
        x[1] = v[n];
        y[0] = a[n];
        with_victim.push(x);
        silent_victim.push(y);
        ASSERT_EQ(with_victim.last_injection(1), silent_victim.last_injection(1)) << n;
    }
}

TEST(Crosstalk, MeasuredTapResidual)
{
    // Compensation tap 0.034 at 68 degrees against a leakage that is close to,
    // but not exactly, its negative.
    const double tap_amp = 0.034, tap_ph = 68 * kDeg;
    const double leak_amp = 0.035, leak_ph = (68 + 180 + 3) * kDeg;
    XtalkConfig cfg{{{0, 1, tap_amp, tap_ph, kDspLatencyCycles}}};
    auto agg = tone(4000, 32767, 0.0071);
    std::vector<std::vector<IqSample>> raw(kChannels);
    raw[0] = agg;
    auto out = apply_crosstalk_compensation(raw, cfg);
    const double frac = oracle::residual_fraction(tap_amp, tap_ph, leak_amp, leak_ph);
    for (std::size_t n = 0; n < agg.size(); n++) {
        auto seen = cplx(out[1][n]) + std::polar(leak_amp, leak_ph) * cplx(out[0][n]);
        ASSERT_NEAR(std::abs(seen), frac * std::abs(cplx(out[0][n])), 1.0) << n;
    }
}

TEST(Crosstalk, TapQuantization)
{
    auto c = quantize_tap(0.5, 0);
    EXPECT_EQ(c.re, std::int64_t(1) << 29);
    EXPECT_EQ(c.im, 0);
    c = quantize_tap(0.034, 68 * kDeg);
    EXPECT_NEAR(double(c.re) / (1 << 30), 0.034 * std::cos(68 * kDeg), 1e-9);
    EXPECT_NEAR(double(c.im) / (1 << 30), 0.034 * std::sin(68 * kDeg), 1e-9);
}

TEST(Crosstalk, FineDelay)
{
    const FreqWord w(kWordModulus / 8);
    EXPECT_EQ(fine_delay_as_phase(w, 0).value, 0u);
    EXPECT_EQ(fine_delay_as_phase(w, 0.5).value, kWordModulus / 8);
    EXPECT_EQ(fine_delay_as_phase(w, 1.0).value, kWordModulus / 4);
    EXPECT_DOUBLE_EQ(fine_delay_turns(w, 1.0), 0.25);
    EXPECT_THROW(fine_delay_as_phase(w, 1.01), ValidationError);
    EXPECT_THROW(fine_delay_as_phase(w, -0.01), ValidationError);
    // Equivalent to the phase the tone accumulates over the delay.
    const FreqWord f = freq_to_word(123.456e6);
    double turns = 123.456e6 * (0.37 / 409.6e6);
    EXPECT_NEAR(fine_delay_turns(f, 0.37), turns, 1e-9);
}

TEST(Crosstalk, BatchLengthMismatch)
{
    std::vector<std::vector<IqSample>> raw(kChannels);
    raw[0].resize(5);
    raw[1].resize(6);
    EXPECT_THROW(apply_crosstalk_compensation(raw, {}), ValidationError);
}
