#pragma once

// Gate-program compiler. Gates are stored once in a three-level lookup-table
// hierarchy per channel:
//
//   GLUT[gate id] -> (MLUT start, MLUT stop)      64 entries
//   MLUT[i]       -> PLUT address                 4096 entries
//   PLUT[a]       -> 256-bit spline word          1024 entries, unique
//
// A program then reduces to gate-id records (36 ids per 256-bit word) plus
// any parameter data that is streamed directly. expand() models the on-chip
// iterator and must reproduce, FIFO by FIFO, exactly what a pure streaming
// compiler (stream_program) would have sent.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfseq/format.hpp"
#include "rfseq/spline.hpp"
#include "rfseq/word.hpp"

namespace rfseq {

struct GateDefinition {
    std::string name;
    /// Knots for any subset of (channel, parameter). meta.channel and
    /// meta.parameter route each word.
    std::vector<SplineWord> words;
    /// (channel, parameter) pairs whose words bypass the LUTs and are streamed
    /// right after the gate id.
    std::vector<std::pair<int, Parameter>> streamed;
    /// Engines wait for an external trigger before starting this gate.
    bool wait_for_trigger = false;
};

struct GateProgram {
    /// Active channels, ascending. Every gate drives all 8 engines of each.
    std::vector<int> channels;
    std::vector<GateDefinition> gates;
    /// Indices into `gates`.
    std::vector<std::size_t> sequence;
};

/// Total cycles of a gate (sum of durations of any one parameter).
std::uint64_t gate_duration(const GateDefinition& g);

/// Validates a gate and brings it into canonical form: pads every missing
/// (channel, parameter) of `channels` with a hold word, checks that every
/// parameter's durations sum to the same total, flags the first word of each
/// parameter when the gate waits for a trigger, and sorts the words by
/// (start cycle within the gate, channel, parameter).
/// Throws ValidationError on inconsistent timing, words on undeclared
/// channels, or a standalone frame rotation shorter than
/// min_frame_rotation_duration().
GateDefinition normalize_gate(const GateDefinition& g, std::span<const int> channels);

/// normalize_gate applied to every gate, plus sequence index checks.
GateProgram normalize_program(const GateProgram& p);

/// Per-channel LUT contents.
struct ChannelLuts {
    std::vector<SplineWord> plut;
    std::vector<std::uint16_t> mlut;
    /// Indexed by gate id; nullopt when the gate keeps no words on this channel.
    std::vector<std::optional<std::pair<std::uint16_t, std::uint16_t>>> glut;

    friend bool operator==(const ChannelLuts&, const ChannelLuts&) = default;
};

struct GateLibrary {
    std::array<ChannelLuts, kChannels> channels;
    std::size_t gate_count = 0;

    friend bool operator==(const GateLibrary&, const GateLibrary&) = default;
};

struct CompiledLibrary {
    GateLibrary library;
    /// PLUT records first, then MLUT, then GLUT, channel by channel.
    std::vector<Word256> programming;
};

/// Builds the LUTs for `gates` (gate id = index). Gates must be normalized.
/// Throws CapacityError naming the exhausted table.
CompiledLibrary compile_library(std::span<const GateDefinition> gates, std::span<const int> channels);

/// Packs gate ids 36 per word, order preserved. Throws ValidationError for ids >= 64.
std::vector<Word256> encode_sequence(std::span<const std::uint8_t> ids);
/// Unpacks a gate-sequence record.
std::vector<std::uint8_t> decode_sequence(const Word256& w);

/// Sequence records for `sequence` (gate ids into `gates`): gate-id words,
/// with each gate's streamed parameters emitted right after the word that
/// ends with its id.
std::vector<Word256> emit_sequence(std::span<const GateDefinition> gates,
                                   std::span<const std::size_t> sequence);

/// What a LUT-free compiler sends: every word of every gate, in order,
/// as spline-data records.
std::vector<Word256> stream_program(const GateProgram& p);

/// Per-(channel, parameter) streams of spline words, indexed [channel][param].
using FifoStreams = std::array<std::array<std::vector<SplineWord>, kParameters>, kChannels>;

/// Hardware model of one channel's LUT front end.
class ChannelSequencer {
public:
    explicit ChannelSequencer(int channel);

    int channel() const { return channel_; }
    /// Consumes one record. Programming records update the LUTs; spline data
    /// and gate ids append words (in FIFO order) to `out`. Records for other
    /// channels are ignored. Throws ValidationError for unbound ids or
    /// dangling LUT pointers.
    void ingest(const Word256& record, std::vector<SplineWord>& out);

    ChannelLuts luts() const;
    bool gate_bound(std::uint8_t id) const { return glut_[id].has_value(); }

private:
    void expand_gate(std::uint8_t id, std::vector<SplineWord>& out) const;

    int channel_;
    std::vector<std::optional<SplineWord>> plut_;
    std::vector<std::optional<std::uint16_t>> mlut_;
    std::vector<std::optional<std::pair<std::uint16_t, std::uint16_t>>> glut_;
};

/// Runs `records` through fresh channel sequencers preloaded with `library`
/// (which may be empty if the records carry the programming themselves).
/// Throws ValidationError when a gate id is bound on no channel.
FifoStreams expand(std::span<const Word256> records, const GateLibrary& library);

/// Routes spline-data records by their metadata (no LUTs involved).
FifoStreams route_streamed(std::span<const Word256> records);

enum class LutStrategy {
    /// Exceeding any LUT is an error.
    Fail,
    /// Split the sequence into segments whose gates fit; reprogram between them.
    Reprogram,
};

struct ProgramSegment {
    /// Gate-program indices bound to ids 0..n-1 for this segment.
    std::vector<std::size_t> gate_ids;
    std::size_t sequence_begin = 0;
    std::size_t sequence_end = 0;
    GateLibrary library;
    std::size_t programming_words = 0;
    std::size_t sequence_words = 0;
};

struct CompiledProgram {
    GateProgram program;  // normalized
    std::vector<ProgramSegment> segments;
    /// Complete transfer: per segment, programming records then sequence records.
    std::vector<Word256> records;
};

CompiledProgram compile_program(const GateProgram& p, LutStrategy strategy = LutStrategy::Fail);

struct LutOccupancy {
    std::size_t used = 0;
    std::size_t capacity = 0;
};

struct CompileReport {
    std::size_t words_programming = 0;
    std::size_t words_sequence = 0;
    std::size_t words_streaming_equivalent = 0;
    /// words_sequence / words_streaming_equivalent.
    double compression_ratio = 0;
    /// (words_programming + words_sequence) / words_streaming_equivalent.
    double compression_ratio_with_programming = 0;
    std::size_t segments = 0;
    /// Peak occupancy across segments, per channel.
    std::array<LutOccupancy, kChannels> plut{};
    std::array<LutOccupancy, kChannels> mlut{};
    LutOccupancy glut{};
    std::vector<int> channels;
};

CompileReport compression_report(const CompiledProgram& c);

/// Minimum data for one gate when every parameter of one channel carries one word.
inline constexpr std::size_t kMinStreamedBitsPerGate = kParameters * Word256::kBits;

/// DMA model: records cross from a 300 MHz domain, serialized round-robin over
/// 8 channels (one slot per channel per round, NOP-padded), i.e. 37.5 MHz per
/// channel.
inline constexpr double kDmaClockHz = 300e6;
inline constexpr double kPerChannelRecordRateHz = kDmaClockHz / kChannels;

struct GateTiming {
    std::size_t sequence_index = 0;
    std::size_t words = 0;  // on the busiest channel
    double supply_ns = 0;
    double consumption_ns = 0;
    bool underflow_risk = false;
};

struct StreamingTiming {
    std::size_t rounds = 0;
    double total_ns = 0;
    std::vector<GateTiming> gates;
    bool underflow_risk = false;
};

/// Transfer time of `records`: broadcast records occupy one slot on every
/// channel, others one slot on their own channel.
StreamingTiming streaming_time_model(std::span<const Word256> records);

/// Per-gate timing of pure streaming for `p` (normalized): supply time of the
/// gate's words against the time the engines take to consume them.
StreamingTiming streaming_time_model(const GateProgram& p);

}  // namespace rfseq
