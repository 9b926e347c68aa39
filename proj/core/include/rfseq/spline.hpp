#pragma once

// Cubic spline engines: one per (channel, parameter). Each engine is a chain
// of accumulators fed from a 256-deep FIFO of SplineWords.
//
// Per running cycle the engine emits acc0 and then updates
//     acc2 += acc3;  acc1 += acc2;  acc0 += acc1;
// (each update sees the already-updated higher order). With that order a word
// reproduces a cubic p(n), n = 0..duration-1, when loaded with the backward
// differences at n = 0: u0 = p(0), u1 = p(0) - p(-1), u2 = p(0) - 2p(-1) + p(-2),
// u3 = third difference. poly_to_knot() computes those.
//
// Coefficient k is stored in units of 2^-(k*s) LSB where s is the word's
// shift, so the accumulators carry 3*s fractional bits. The output is acc0
// rounded to an integer and reduced modulo 2^40.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>

#include "rfseq/dds.hpp"
#include "rfseq/word.hpp"

namespace rfseq {

enum class Parameter : std::uint8_t {
    Freq0 = 0,
    Phase0 = 1,
    Amp0 = 2,
    Frame0 = 3,
    Freq1 = 4,
    Phase1 = 5,
    Amp1 = 6,
    Frame1 = 7,
};

inline constexpr int kParameters = 8;
inline constexpr int kEngines = kChannels * kParameters;

enum class ParamKind : std::uint8_t { Freq, Phase, Amp, Frame };

constexpr ParamKind kind_of(Parameter p) { return ParamKind(unsigned(p) % 4); }
constexpr int tone_of(Parameter p) { return int(p) / 4; }
constexpr Parameter make_parameter(int tone, ParamKind kind) { return Parameter(tone * 4 + int(kind)); }
std::string_view parameter_name(Parameter p);
std::optional<Parameter> parameter_from_name(std::string_view name);

inline constexpr unsigned kMaxShift = 15;

struct SplineMetadata {
    std::uint8_t channel = 0;
    Parameter parameter = Parameter::Freq0;
    bool wait_for_trigger = false;
    bool sync = false;
    bool feedforward_enable = false;
    FrameMask frame_mask;
    bool hold = false;
    std::uint8_t shift = 0;

    friend bool operator==(const SplineMetadata&, const SplineMetadata&) = default;
};

struct SplineWord {
    /// 40-bit two's-complement coefficient fields.
    std::array<std::uint64_t, 4> coeffs{};
    std::uint64_t duration = 1;
    SplineMetadata meta;

    friend bool operator==(const SplineWord&, const SplineWord&) = default;
};

/// Encodes a spline-data record (or a PLUT programming record when
/// `plut_address` is given). Throws ValidationError on out-of-range fields.
Word256 encode(const SplineWord& w, std::optional<std::uint16_t> plut_address = std::nullopt);
/// Decodes a spline-data or PLUT programming record; throws ValidationError if
/// the record is of another type or has reserved bits set.
SplineWord decode_spline(const Word256& raw);

/// A constant word: u0 = value, all other coefficients zero.
SplineWord constant_word(Parameter p, std::uint64_t value, std::uint64_t duration, std::uint8_t channel = 0);
/// A hold (NOP) word of the given duration.
SplineWord hold_word(Parameter p, std::uint64_t duration, std::uint8_t channel = 0);

struct KnotCoefficients {
    std::array<std::uint64_t, 4> coeffs{};
    std::uint8_t shift = 0;
};

/// Maps p(tau) = c0 + c1 tau + c2 tau^2 + c3 tau^3, tau = n / duration, with
/// the c_k in output LSBs, onto accumulator-chain coefficients. Picks the
/// largest shift (<= kMaxShift) at which every field fits. Throws
/// ValidationError for duration 0 and OverflowError when u1..u3 cannot be
/// represented in 40 bits even at shift 0 (u0 may be any value in
/// [-2^39, 2^40), it is reduced modulo 2^40).
KnotCoefficients poly_to_knot(const std::array<double, 4>& c, std::uint64_t duration);

/// Worst-case |engine output - p(n)| for sample n of a word produced by
/// poly_to_knot with the given shift: rounding of the four fields propagated
/// through the chain plus the output rounding.
double interpolation_error_bound(unsigned shift, std::uint64_t n);

enum class IdlePolicy { HoldLast, Zero };

class SplineEngine {
public:
    static constexpr std::size_t kFifoDepth = 256;

    struct Output {
        /// Output word (mod 2^40).
        std::uint64_t value = 0;
        /// Set on the first cycle of a word; carries its metadata.
        bool word_started = false;
        /// Set on the last cycle of a word.
        bool word_finished = false;
        SplineMetadata meta;
    };

    explicit SplineEngine(IdlePolicy idle = IdlePolicy::HoldLast) : idle_(idle) {}

    /// False (and no change) if the FIFO is full.
    bool push(const SplineWord& w);
    std::size_t fifo_size() const { return fifo_.size(); }
    bool fifo_full() const { return fifo_.size() >= kFifoDepth; }

    /// Marks the end of input; an empty FIFO after this is quiescence, not underflow.
    void close_input() { closed_ = true; }
    bool input_closed() const { return closed_; }

    bool awaiting_trigger() const { return awaiting_; }
    /// Releases an engine waiting for a trigger. No-op when the engine is
    /// running or has nothing queued.
    void trigger();

    /// True when no word is active and nothing is queued.
    bool idle() const { return remaining_ == 0 && !pending_ && fifo_.empty(); }

    /// Advances one cycle. Throws SimulationFault when the engine needs a word
    /// mid-sequence and the FIFO is empty. `cycle`, `channel`, `param` only
    /// label the fault.
    Output step(std::uint64_t cycle = 0, int channel = -1, int param = -1);

    std::uint64_t value() const { return value_; }
    std::uint64_t remaining() const { return remaining_; }

private:
    void load(const SplineWord& w);

    std::deque<SplineWord> fifo_;
    std::optional<SplineWord> pending_;
    IdlePolicy idle_;
    bool closed_ = false;
    bool awaiting_ = true;
    // A trigger lets the next word start even if it carries the wait flag.
    bool armed_ = false;
    std::uint64_t remaining_ = 0;
    SplineMetadata meta_;
    unsigned frac_bits_ = 0;
    unsigned __int128 mask_ = 0;
    std::array<unsigned __int128, 4> acc_{};
    bool hold_ = false;
    std::uint64_t value_ = 0;
};

/// Sequencer-clock cycles a standalone frame rotation occupies at minimum.
constexpr std::uint64_t min_frame_rotation_duration() { return 4; }
inline constexpr double kMinFrameRotationSeconds = 4.0 / double(kSequencerClockHz);

/// Evaluates p(n) for n = 0..duration-1 the way the hardware does: load the
/// word into a fresh engine and step it. Handy for tests and tools.
std::uint64_t evaluate_word(const SplineWord& w, std::uint64_t n);

}  // namespace rfseq
