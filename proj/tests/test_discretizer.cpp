#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "rfseq/discretizer.hpp"
#include "rfseq/error.hpp"

using namespace rfseq;

namespace {

constexpr double kCarrierHz = 228732824.32571054;
constexpr double kSidebandHz = 2235174.1793751717;

}  // namespace

TEST(Discretizer, MsExampleWords)
{
    EXPECT_EQ(freq_to_word(kCarrierHz).value, 307000000000u);
    EXPECT_EQ(freq_to_word(kCarrierHz - kSidebandHz).value, 304000000000u);
    EXPECT_EQ(freq_to_word(kCarrierHz + kSidebandHz).value, 310000000001u);
    auto a = validate_ms_triplet(
        {freq_to_word(kCarrierHz), freq_to_word(kCarrierHz - kSidebandHz), freq_to_word(kCarrierHz + kSidebandHz)});
    EXPECT_FALSE(a.aligned);
    EXPECT_EQ(a.epsilon_mismatch, -1);
}

TEST(Discretizer, FixedTripletIsAligned)
{
    auto t = fix_ms_triplet(freq_to_word(kCarrierHz), kSidebandHz);
    EXPECT_EQ(t.red.value, 304000000000u);
    EXPECT_EQ(t.blue.value, 310000000000u);
    EXPECT_TRUE(validate_ms_triplet(t).aligned);
}

TEST(Discretizer, EpsilonIsExact)
{
    EXPECT_EQ(kFepsHz, 819.2e6 / 1099511627776.0);
    EXPECT_EQ(kFepsHz, 7.450580596923828125e-4);
    EXPECT_EQ(word_to_freq(FreqWord(1)), kFepsHz);
}

TEST(Discretizer, KnownWords)
{
    EXPECT_EQ(freq_to_word(0).value, 0u);
    EXPECT_EQ(freq_to_word(200e6).value, 268435456000u);
    EXPECT_EQ(freq_to_word(kFepsHz).value, 1u);
    // Half a count rounds away from zero; just below half rounds down.
    EXPECT_EQ(freq_to_word(kFepsHz / 2).value, 1u);
    EXPECT_EQ(freq_to_word(std::nextafter(kFepsHz / 2, 0.0)).value, 0u);
    EXPECT_EQ(freq_to_word(2.5 * kFepsHz).value, 3u);
}

TEST(Discretizer, OutOfBand)
{
    EXPECT_THROW(freq_to_word(-1.0), OutOfBandError);
    EXPECT_THROW(freq_to_word(409.6e6), OutOfBandError);
    EXPECT_THROW(freq_to_word(std::numeric_limits<double>::quiet_NaN()), OutOfBandError);
    EXPECT_THROW(freq_to_word(std::numeric_limits<double>::infinity()), OutOfBandError);
    EXPECT_NO_THROW(freq_to_word(std::nextafter(409.6e6, 0.0)));
}

TEST(DiscretizerProperty, RoundTripWithinHalfEpsilon)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> nu(0, 409.6e6);
    for (int i = 0; i < 100000; i++) {
        double f = nu(rng);
        auto w = freq_to_word(f);
        ASSERT_LT(w.value, kWordModulus);
        ASSERT_LE(std::fabs(word_to_freq(w) - f), kFepsHz / 2 * (1 + 1e-9)) << f;
        ASSERT_EQ(w.value, oracle::freq_word(f)) << f;
    }
}

TEST(DiscretizerProperty, Monotone)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> nu(0, 409.6e6);
    std::uniform_real_distribution<double> step(0, 4 * kFepsHz);
    for (int i = 0; i < 100000; i++) {
        double a = nu(rng);
        double b = std::min(a + step(rng), std::nextafter(409.6e6, 0.0));
        ASSERT_LE(freq_to_word(a).value, freq_to_word(b).value) << a << " " << b;
    }
}

TEST(DiscretizerProperty, FixedTripletsAlwaysAlign)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> carrier(50e6, 350e6);
    std::uniform_real_distribution<double> offset(-40e6, 40e6);
    for (int i = 0; i < 20000; i++) {
        auto t = fix_ms_triplet(freq_to_word(carrier(rng)), offset(rng));
        auto a = validate_ms_triplet(t);
        ASSERT_TRUE(a.aligned);
        ASSERT_EQ(a.epsilon_mismatch, 0);
    }
}

TEST(Discretizer, FixTripletOutOfBand)
{
    EXPECT_THROW(fix_ms_triplet(freq_to_word(400e6), -20e6), OutOfBandError);
    EXPECT_THROW(fix_ms_triplet(freq_to_word(1e6), 2e6), OutOfBandError);
}

TEST(DiscretizerProperty, PhaseAdditionModular)
{
    std::mt19937_64 rng(14);
    for (int i = 0; i < 100000; i++) {
        PhaseWord a(rng()), b(rng()), c(rng());
        ASSERT_EQ((a + b) + c, a + (b + c));
        ASSERT_EQ(a + b, b + a);
        ASSERT_EQ((a + b).value, (a.value + b.value) % kWordModulus);
        ASSERT_EQ(a - a, PhaseWord(0));
    }
}

TEST(Discretizer, PhaseHelpers)
{
    EXPECT_EQ(phase_from_turns(0.25).value, kWordModulus / 4);
    EXPECT_EQ(phase_from_turns(-0.25).value, 3 * kWordModulus / 4);
    EXPECT_EQ(phase_from_turns(1.0).value, 0u);
    EXPECT_EQ(phase_from_radians(std::numbers::pi).value, kWordModulus / 2);
    EXPECT_DOUBLE_EQ(PhaseWord(kWordModulus / 4).radians(), std::numbers::pi / 2);
}

TEST(Discretizer, AmplitudeHelpers)
{
    EXPECT_EQ(amp_from_fraction(1.0).value, 32767);
    EXPECT_EQ(amp_from_fraction(-1.0).value, -32767);
    EXPECT_EQ(amp_from_fraction(0.5).value, 16384);
    EXPECT_EQ(AmpWord::from_padded(AmpWord(-123).padded()).value, -123);
    EXPECT_THROW(amp_from_fraction(1.5), Error);
}

TEST(Discretizer, QubitFrequency)
{
    EXPECT_EQ(qubit_frequency(0), kQubitZeroFieldHz);
    EXPECT_DOUBLE_EQ(qubit_frequency(5), kQubitZeroFieldHz + 310.8 * 25);
    EXPECT_THROW(qubit_frequency(-1), ValidationError);
}

TEST(Discretizer, OffsetCountsRoundsOnce)
{
    // 1.5 counts below 10 rounds to 8.5 -> 9 (half away from zero).
    EXPECT_EQ(offset_counts_rounded(10, 1.5 * kFepsHz), 9);
    EXPECT_EQ(offset_counts_rounded(0, 1.5 * kFepsHz), -2);
    EXPECT_EQ(offset_counts_rounded(0, -1.5 * kFepsHz), 2);
}
