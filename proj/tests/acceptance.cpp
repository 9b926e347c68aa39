// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "gen.hpp"
#include "oracles.hpp"
#include "ramsey.hpp"
#include "rfseq/crosstalk.hpp"
#include "rfseq/error.hpp"
#include "rfseq/feedforward.hpp"
#include "rfseq_tools/pipeline.hpp"

using namespace rfseq;

namespace {

// Tolerances.
constexpr double kFepsReported = 7.4506e-4;
constexpr double kFepsRelTol = 1e-8;
constexpr double kStreamGateNs = 213.3;
constexpr double kStreamGateTolNs = 1.0;
constexpr int kExpansionTrials = 1000;
constexpr int kSplineTrials = 1000;
constexpr std::uint64_t kSplineMaxCycles = 10000;
constexpr int kSyncTrials = 100;
constexpr double kFringePhaseTol = 2 * std::numbers::pi * 1e-6;
constexpr double kRamseyTol = 1e-6;
constexpr double kDriftSpanHz = 5000;
constexpr double kDetuningTolHz = kFepsHz;  // one frequency LSB
constexpr double kXtalkTolLsb = 1.0;
constexpr std::uint64_t kMinFrameCycles = 4;
constexpr double kMinFrameSeconds = 9.765625e-9;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Criterion = std::function<void(Outcome&)>;

void crit1(Outcome& o)
{
    const double carrier = 228732824.32571054, sideband = 2235174.1793751717;
    const auto c = freq_to_word(carrier), r = freq_to_word(carrier - sideband), b = freq_to_word(carrier + sideband);
    o.require(c.value == 307000000000ull, "carrier word");
    o.require(r.value == 304000000000ull, "red word");
    o.require(b.value == 310000000001ull, "blue word");
    auto a = validate_ms_triplet({c, r, b});
    o.require(!a.aligned && std::llabs(a.epsilon_mismatch) == 1, "one-epsilon mismatch");
    o.detail << "carrier " << c.value << ", red " << r.value << ", blue " << b.value << ", 2c-(r+b) = "
             << a.epsilon_mismatch;
}

void crit2(Outcome& o)
{
    const long double exact = 819.2e6L / 1099511627776.0L;
    o.require(std::fabs((long double)kFepsHz / exact - 1) <= kFepsRelTol, "f_s / 2^40");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", kFepsHz);
    o.require(std::string(buf) == "7.4506e-04", "reported value");
    o.require(std::fabs(std::stod(buf) - kFepsReported) == 0, "reported value");
    o.require(std::lround(kFepsHz * 1e6) == 745, "745 uHz");
    o.detail << "f_eps = " << buf << " Hz (" << kFepsHz << ")";
}

void crit3(Outcome& o)
{
    GateProgram p;
    p.channels = {0};
    GateDefinition g;
    g.name = "x";
    g.words = {constant_word(Parameter::Freq0, 1000, 512), constant_word(Parameter::Amp0, AmpWord(32767).padded(), 512)};
    p.gates.push_back(g);
    p.sequence.assign(36, 0);
    auto c = compile_program(p);
    auto r = compression_report(c);
    o.require(r.words_sequence == 1, "36 ids in one word");
    const double want = 256.0 / (36.0 * 8 * 256);
    o.require(std::fabs(r.compression_ratio - want) < 1e-15, "compression ratio");
    o.require(std::lround(r.compression_ratio * 1e4) == 35, "~0.35%");
    p.sequence = {0};
    auto single = compression_report(compile_program(p));
    o.require(single.words_programming + single.words_sequence == 11, "minimal program 11 words");
    o.require(kMinStreamedBitsPerGate == 2048, "2 kib per gate");
    auto t = streaming_time_model(normalize_program(p));
    o.require(t.gates.size() == 1 && t.gates[0].words == 8, "8-word gate");
    o.require(!t.gates.empty() && std::fabs(t.gates[0].supply_ns - kStreamGateNs) <= kStreamGateTolNs, "213 ns");
    o.detail << "ratio " << r.compression_ratio * 100 << "%, single gate " << single.words_programming << "+"
             << single.words_sequence << " words, stream " << (t.gates.empty() ? 0 : t.gates[0].supply_ns) << " ns";
}

void crit4(Outcome& o)
{
    std::mt19937_64 rng(4004);
    int mismatches = 0;
    std::size_t words = 0;
    for (int i = 0; i < kExpansionTrials; i++) {
        auto p = gen::program(rng);
        auto c = compile_program(p, i % 2 ? LutStrategy::Reprogram : LutStrategy::Fail);
        auto want = oracle::direct_streams(c.program);
        for (const auto& ch : want)
            for (const auto& q : ch)
                words += q.size();
        if (expand(c.records, GateLibrary{}) != want)
            mismatches++;
    }
    o.require(mismatches == 0, "expand == streaming");
    o.detail << kExpansionTrials << " programs, " << words << " words, " << mismatches << " mismatches";
}

void crit5(Outcome& o)
{
    std::mt19937_64 rng(5005);
    double worst_ratio = 0;
    int violations = 0, const_errors = 0;
    for (int i = 0; i < kSplineTrials; i++) {
        std::uint64_t n = 1 + rng() % kSplineMaxCycles;
        std::uniform_real_distribution<double> c0(-5e11, 5e11);
        double scale = std::ldexp(1.0, int(rng() % 36));
        std::uniform_real_distribution<double> ck(-scale, scale);
        std::array<double, 4> c{c0(rng), ck(rng), ck(rng), ck(rng)};
        auto k = poly_to_knot(c, n);
        SplineWord w;
        w.coeffs = k.coeffs;
        w.meta.shift = k.shift;
        w.duration = n;
        SplineEngine e;
        e.push(w);
        e.close_input();
        e.trigger();
        for (std::uint64_t j = 0; j < n; j++) {
            double err = double(oracle::ring_distance(oracle::poly(c, n, j), e.step().value));
            double bound = interpolation_error_bound(k.shift, j);
            worst_ratio = std::max(worst_ratio, err / bound);
            violations += err > bound;
        }
        // Constants.
        std::uint64_t v = rng() & kWordMask;
        SplineEngine ce;
        ce.push(constant_word(Parameter::Amp0, v, n));
        ce.close_input();
        ce.trigger();
        for (std::uint64_t j = 0; j < n; j++)
            const_errors += ce.step().value != v;
    }
    o.require(violations == 0, "within bound");
    o.require(const_errors == 0, "constants exact");
    o.detail << kSplineTrials << " cubics, worst error/bound " << worst_ratio << ", constant errors " << const_errors;
}

double fringe_phase(ramsey::Params p, std::uint64_t counter)
{
    using namespace rfseq::tools;
    auto p1 = [&](double turns) {
        p.frame_turns = turns;
        auto pf = parse_program(ramsey::yaml(p));
        SimOptions so;
        so.pin_counter = counter;
        auto r = simulate_program(pf, compile(pf), so);
        return run_trace(r.trace, pair_spec(pf.raman[0])).p1();
    };
    // P(1)(phi) = (1 + cos(phi - theta)) / 2
    return std::atan2(2 * p1(0.25) - 1, 2 * p1(0.0) - 1);
}

void crit6(Outcome& o)
{
    std::mt19937_64 rng(6006);
    int bad = 0;
    for (int i = 0; i < kSyncTrials; i++) {
        FreqWord w(rng());
        GlobalCounter c{rng() & kWordMask};
        ChannelState ch;
        ch.tones[0].freq = w;
        ch.tones[0].phase_acc = PhaseWord(rng());
        sync_pulse(ch.tones[0], c);
        const std::uint64_t t = c.t, k = rng() % 100000;
        for (std::uint64_t n = 0; n < k; n++) {
            step(ch);
            c.advance();
        }
        bad += ch.tones[0].phase_acc.value != ((t + k) * w.value & kWordMask);
    }
    o.require(bad == 0, "sync-then-run");

    ramsey::Params p;
    p.park_cycles = 2777;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 6; i++) {
        double th = fringe_phase(p, rng() & kWordMask);
        lo = std::min(lo, th);
        hi = std::max(hi, th);
    }
    o.require(hi - lo < kFringePhaseTol, "fringe phase independent of power-up counter");
    o.detail << kSyncTrials << " triples exact (" << bad << " bad), fringe phase spread " << (hi - lo) << " rad";
}

std::vector<DriveSegment> segments(const ramsey::Params& p, std::uint64_t counter, double* p1 = nullptr)
{
    using namespace rfseq::tools;
    auto pf = parse_program(ramsey::yaml(p));
    SimOptions so;
    so.pin_counter = counter;
    auto r = simulate_program(pf, compile(pf), so);
    auto spec = pair_spec(pf.raman[0]);
    auto segs = drive_from_trace(r.trace, spec);
    if (p1)
        *p1 = evolve(QubitState{}, segs).p1();
    return segs;
}

void crit7(Outcome& o)
{
    double worst = 0;
    const std::uint64_t counter = 0x5eed5eed5ull;
    for (int k = 0; k <= 32; k++) {
        ramsey::Params p;
        p.frame_turns = k / 32.0;
        double p1 = 0;
        segments(p, counter, &p1);
        worst = std::max(worst, std::fabs(p1 - oracle::ramsey_p1(2 * std::numbers::pi * p.frame_turns)));
    }
    o.require(worst < kRamseyTol, "P(1) = cos^2(phi/2)");

    std::mt19937_64 rng(7007);
    int mismatches = 0;
    for (int i = 0; i < 8; i++) {
        ramsey::Params up, down, both, none;
        up.frame_turns = down.frame_turns = both.frame_turns = none.frame_turns = double(rng() % 4096) / 4096.0;
        down.frame_upper = false;
        down.frame_lower = true;
        down.invert_lower = true;
        both.frame_lower = true;
        none.frame_upper = false;
        mismatches += segments(up, counter) != segments(down, counter);
        mismatches += segments(both, counter) != segments(none, counter);
    }
    // The same at the level of a single pair of tones.
    const RamanCalibration cal{1e6, 1000};
    for (int i = 0; i < 1000; i++) {
        RamanTone a{FreqWord(rng() % (kWordModulus / 2)), PhaseWord(rng()), AmpWord(std::int16_t(rng() % 32767))};
        RamanTone b{FreqWord(rng() % (kWordModulus / 2)), PhaseWord(rng()), AmpWord(std::int16_t(rng() % 32767))};
        if (a.freq < b.freq)
            std::swap(a, b);
        PhaseWord phi(rng());
        auto base = raman_pair_to_drive(a, b, cal, 1e-6);
        mismatches += raman_pair_to_drive({a.freq, a.phase + phi, a.amp}, b, cal, 1e-6) !=
                      raman_pair_to_drive(a, {b.freq, b.phase - phi, b.amp}, cal, 1e-6);
        mismatches += raman_pair_to_drive({a.freq, a.phase + phi, a.amp}, {b.freq, b.phase + phi, b.amp}, cal, 1e-6) !=
                      base;
    }
    o.require(mismatches == 0, "upper +phi == lower -phi, both = no-op");
    o.detail << "max |P(1) - cos^2(phi/2)| = " << worst << ", equivalence mismatches " << mismatches;
}

void crit8(Outcome& o)
{
    FeedforwardConfig cfg;
    o.require(cfg.harmonic_scale() == Rational{105, 32}, "105/32");
    o.require(feedforward_correction(32.0, cfg) == 105.0, "exact scale");

    const double rep = 120.3e6;
    struct Case {
        RamanGroup group;
        std::vector<std::pair<int, int>> pairs;  // indices into tones
    };
    const std::vector<Case> cases = {
        {{RamanRole::SingleQubit, {{0, 0, 201.3e6}, {0, 1, 213.7e6}}}, {{0, 1}}},
        {{RamanRole::SingleQubit, {{0, 0, 213.7e6}, {1, 0, 201.3e6}}}, {{0, 1}}},
        {{RamanRole::MsSidebandsUpper, {{0, 0, 200e6}, {1, 0, 226.5e6}, {1, 1, 231.0e6}}}, {{0, 1}, {0, 2}}},
        {{RamanRole::MsSidebandsLower, {{0, 0, 250e6}, {1, 0, 226.5e6}, {1, 1, 231.0e6}}}, {{0, 1}, {0, 2}}},
    };
    long double worst = 0;
    for (const auto& cs : cases) {
        auto route = route_feedforward(cs.group);
        std::vector<ToneState> tones(route.size());
        for (std::size_t i = 0; i < route.size(); i++) {
            tones[i].freq = freq_to_word(route[i].tone.freq_hz);
            tones[i].feedforward_enabled = route[i].enabled;
            tones[i].feedforward_sign = route[i].sign;
        }
        for (auto [i, j] : cs.pairs) {
            const bool i_up = tones[i].freq > tones[j].freq;
            const auto& up = i_up ? tones[i] : tones[j];
            const auto& dn = i_up ? tones[j] : tones[i];
            const long double feps = 3125.0L / 4194304.0L;
            const long double qubit =
                105.0L * rep + ((long double)up.freq.value - (long double)dn.freq.value) * feps;
            for (double d = -kDriftSpanHz; d <= kDriftSpanHz; d += 7.8125) {
                auto counts = correction_counts(feedforward_correction(32 * d, cfg));
                long double det = 105.0L * (rep + d) +
                                  (long double)effective_frequency(up, counts).value * feps -
                                  (long double)effective_frequency(dn, counts).value * feps - qubit;
                worst = std::max(worst, std::fabs(det));
            }
        }
    }
    o.require(worst <= kDetuningTolHz, "detuning within 1 f_eps");
    o.detail << "max |detuning| " << double(worst) << " Hz over +/-" << kDriftSpanHz << " Hz drift (1 f_eps = "
             << kFepsHz << " Hz)";
}

void crit9(Outcome& o)
{
    auto tone = [](std::size_t n, double amp, double f) {
        std::vector<IqSample> v(n);
        for (std::size_t k = 0; k < n; k++)
            v[k] = {std::int32_t(std::lround(amp * std::cos(2 * std::numbers::pi * f * k))),
                    std::int32_t(std::lround(amp * std::sin(2 * std::numbers::pi * f * k)))};
        return v;
    };
    auto cx = [](IqSample s) { return std::complex<double>(s.i, s.q); };

    // Exact cancellation.
    const auto leak = std::polar(0.034, (68.0 + 180.0) * std::numbers::pi / 180);
    XtalkConfig cancel{{{0, 1, std::abs(leak), std::arg(-leak), kDspLatencyCycles}}};
    std::vector<std::vector<IqSample>> raw(kChannels);
    raw[0] = tone(5000, 32767, 0.0137);
    auto out = apply_crosstalk_compensation(raw, cancel);
    double exact = 0;
    for (std::size_t n = 0; n < raw[0].size(); n++)
        exact = std::max(exact, std::abs(cx(out[1][n]) + leak * cx(out[0][n])));
    o.require(exact <= kXtalkTolLsb, "exact cancellation");

    // No recursion.
    XtalkConfig both{{{0, 1, 0.034, 68 * std::numbers::pi / 180, 4}, {1, 0, 0.05, -0.4, 6}}};
    CrosstalkCompensator a(both), b(both);
    auto victim = tone(5000, 20000, 0.021);
    int changed = 0;
    for (std::size_t n = 0; n < victim.size(); n++) {
        std::array<IqSample, kChannels> x{}, y{};
        x[0] = y[0] = raw[0][n];
        x[1] = victim[n];
        a.push(x);
        b.push(y);
        changed += !(a.last_injection(1) == b.last_injection(1));
    }
    o.require(changed == 0, "no recursion");

    // Tap 0.034 at 68 degrees against a leakage it does not exactly cancel.
    const double tap_amp = 0.034, tap_ph = 68 * std::numbers::pi / 180;
    const double leak_amp = 0.0345, leak_ph = (68 + 180 + 4) * std::numbers::pi / 180;
    XtalkConfig measured{{{0, 1, tap_amp, tap_ph, kDspLatencyCycles}}};
    out = apply_crosstalk_compensation(raw, measured);
    const double frac = oracle::residual_fraction(tap_amp, tap_ph, leak_amp, leak_ph);
    double dev = 0;
    for (std::size_t n = 0; n < raw[0].size(); n++) {
        double seen = std::abs(cx(out[1][n]) + std::polar(leak_amp, leak_ph) * cx(out[0][n]));
        dev = std::max(dev, std::fabs(seen - frac * std::abs(cx(out[0][n]))));
    }
    o.require(dev <= kXtalkTolLsb, "oracle residual");
    o.detail << "cancellation residual " << exact << " LSB, recursion changes " << changed
             << ", residual vs oracle " << dev << " LSB (oracle fraction " << frac << ")";
}

void crit10(Outcome& o)
{
    o.require(min_frame_rotation_duration() == kMinFrameCycles, "4 cycles");
    o.require(kMinFrameRotationSeconds == kMinFrameSeconds, "9.765625 ns");
    o.require(double(kMinFrameCycles) / double(kSequencerClockHz) == kMinFrameSeconds, "4 cycles at 409.6 MHz");
    auto program = [](std::uint64_t d) {
        GateProgram p;
        p.channels = {0};
        GateDefinition g;
        g.name = "z";
        auto w = constant_word(Parameter::Frame0, kWordModulus / 8, d);
        w.meta.frame_mask.apply = true;
        g.words = {w};
        p.gates = {g};
        p.sequence = {0};
        return p;
    };
    bool rejected = false;
    try {
        compile_program(program(3));
    }
    catch (const ValidationError&) {
        rejected = true;
    }
    o.require(rejected, "duration 3 rejected");
    bool accepted = true;
    try {
        compile_program(program(4));
    }
    catch (const Error&) {
        accepted = false;
    }
    o.require(accepted, "duration 4 accepted");
    o.detail << "minimum " << min_frame_rotation_duration() << " cycles = " << kMinFrameRotationSeconds * 1e9
             << " ns; duration 3 " << (rejected ? "rejected" : "accepted");
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, Criterion>> criteria = {
        {"MS discretization example", crit1},
        {"frequency resolution", crit2},
        {"gate-id compression", crit3},
        {"LUT expansion equals streaming", crit4},
        {"spline engine vs polynomial", crit5},
        {"phase synchronization", crit6},
        {"virtual Z", crit7},
        {"repetition-rate feed-forward", crit8},
        {"crosstalk compensation", crit9},
        {"minimum frame rotation", crit10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); i++) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        }
        catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("criterion %2zu: %s  %s: %s (%.2f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.str().c_str(), secs);
    }
    return failed;
}
