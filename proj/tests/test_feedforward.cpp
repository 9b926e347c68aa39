#include <gtest/gtest.h>

#include <cmath>

#include "rfseq/error.hpp"
#include "rfseq/feedforward.hpp"

using namespace rfseq;

TEST(Feedforward, HarmonicScaleIsExact)
{
    FeedforwardConfig cfg;
    EXPECT_EQ(cfg.harmonic_scale(), (Rational{105, 32}));
    EXPECT_EQ(feedforward_correction(32.0), 105.0);
    EXPECT_EQ(feedforward_correction(1.0), 3.28125);
    EXPECT_EQ(feedforward_correction(1.0, cfg, -1), -3.28125);
    EXPECT_EQ(feedforward_correction(10.0, {.target_harmonic = 104, .monitor_harmonic = 32}), 32.5);
    EXPECT_THROW(feedforward_correction(1.0, {.target_harmonic = 1, .monitor_harmonic = 0}), ValidationError);
    EXPECT_THROW(feedforward_correction(1.0, cfg, 2), ValidationError);
}

TEST(Feedforward, CountsRoundHalfAway)
{
    EXPECT_EQ(correction_counts(0), 0);
    EXPECT_EQ(correction_counts(10 * kFepsHz), 10);
    EXPECT_EQ(correction_counts(2.5 * kFepsHz), 3);
    EXPECT_EQ(correction_counts(-2.5 * kFepsHz), -3);
}

TEST(Feedforward, SinglePairCorrectsUpperLeg)
{
    RamanGroup g{RamanRole::SingleQubit, {{0, 0, 200e6}, {0, 1, 210e6}}};
    auto r = route_feedforward(g);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_FALSE(r[0].enabled);
    EXPECT_TRUE(r[1].enabled);
    EXPECT_EQ(r[1].sign, -1);
    EXPECT_TRUE(lint_feedforward(g, {false, true}).empty());
    EXPECT_FALSE(lint_feedforward(g, {true, true}).empty());
    EXPECT_FALSE(lint_feedforward(g, {true, false}).empty());
    EXPECT_FALSE(lint_feedforward(g, {false, false}).empty());
    g.tones[1].freq_hz = 200e6;
    EXPECT_THROW(route_feedforward(g), ValidationError);
}

TEST(Feedforward, MsRouting)
{
    RamanGroup up{RamanRole::MsSidebandsUpper, {{0, 0, 200e6}, {1, 0, 226e6}, {1, 1, 230e6}}};
    auto r = route_feedforward(up);
    EXPECT_FALSE(r[0].enabled);
    EXPECT_TRUE(r[1].enabled);
    EXPECT_TRUE(r[2].enabled);

    RamanGroup down{RamanRole::MsSidebandsLower, {{0, 0, 250e6}, {1, 0, 226e6}, {1, 1, 230e6}}};
    r = route_feedforward(down);
    EXPECT_TRUE(r[0].enabled);
    EXPECT_FALSE(r[1].enabled);
    EXPECT_FALSE(r[2].enabled);

    EXPECT_THROW(route_feedforward({RamanRole::MsSidebandsUpper, down.tones}), ValidationError);
    EXPECT_THROW(route_feedforward({RamanRole::MsSidebandsLower, up.tones}), ValidationError);
    EXPECT_THROW(route_feedforward({RamanRole::MsSidebandsUpper, {up.tones[0], up.tones[1]}}), ValidationError);
}

TEST(FeedforwardProperty, DetuningStaysWithinEpsilon)
{
    const double rep = 120.13e6;
    const FreqWord upper = freq_to_word(210.5e6), lower = freq_to_word(200.25e6);
    TwoPhotonSetup s{105, rep, upper, lower, 0, -1};
    s.qubit_hz = double(105 * (long double)rep + word_to_freq(upper) - word_to_freq(lower));
    const long double base = two_photon_detuning(s, 0, 0);
    for (double d = -5000; d <= 5000; d += 12.5) {
        // The monitor sees the drift at harmonic 32.
        auto counts = correction_counts(feedforward_correction(32 * d));
        long double det = two_photon_detuning(s, d, counts) - base;
        ASSERT_LE(std::fabs(double(det)), kFepsHz) << d;
        // Without the correction the detuning follows the drift.
        ASSERT_NEAR(double(two_photon_detuning(s, d, 0) - base), 105 * d, 1e-3);
    }
}

TEST(Feedforward, WrongLegDoublesError)
{
    // Correcting the lower leg instead (same sign) pushes the detuning the
    // other way: the error is twice the drift term.
    const FreqWord upper = freq_to_word(210e6), lower = freq_to_word(200e6);
    TwoPhotonSetup s{105, 120e6, upper, lower, 0, +1};
    auto counts = correction_counts(feedforward_correction(32 * 1000.0));
    long double det = two_photon_detuning(s, 1000.0, counts) - two_photon_detuning(s, 0, 0);
    EXPECT_NEAR(double(det), 2 * 105000.0, 1.0);
}

TEST(Feedforward, TrackingFilter)
{
    TrackingFilter pass;
    EXPECT_EQ(pass.update(3.5), 3.5);
    TrackingFilter f(0.25);
    double y = 0;
    for (int i = 0; i < 200; i++)
        y = f.update(100.0);
    EXPECT_NEAR(y, 100.0, 1e-9);
    EXPECT_THROW(TrackingFilter(0.0), ValidationError);
    EXPECT_THROW(TrackingFilter(1.5), ValidationError);
}
