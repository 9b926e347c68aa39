#pragma once

// Cycle model of the whole signal chain: DMA delivery of 256-bit records,
// per-channel LUT expansion, arbitration into the 64 parameter FIFOs, spline
// engines, and two DDS samples per sequencer cycle.
//
// DMA: one record slot per channel every 8 ticks of the 300 MHz clock, i.e.
// 375/4096 records per 409.6 MHz cycle and channel, tracked with an integer
// credit. Broadcast records take a slot on every channel.
//
// Per cycle, in order: DMA delivery, arbitration (head-of-line blocking on a
// full FIFO), trigger, engine step, parameter update (syncs after the new
// frequency is in place), two DDS samples, frame commits for frame words
// that ended this cycle.

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "rfseq/dds.hpp"
#include "rfseq/sequencer.hpp"
#include "rfseq/spline.hpp"
#include "rfseq/word.hpp"

namespace rfseq {

/// Static-mode contribution for one tone. The engine value is added to the
/// static value, and the amplitude is scaled last.
struct ToneSettings {
    FreqWord freq;
    PhaseWord phase;
    std::int32_t amp_offset = 0;
    double amp_scale = 1.0;
    int feedforward_sign = +1;
};

struct MachineConfig {
    std::uint64_t power_up_counter = 0;
    IdlePolicy idle = IdlePolicy::HoldLast;
    /// Fire the trigger as soon as every active engine waits and no channel
    /// can make more progress filling its FIFOs.
    bool auto_trigger = true;
    /// Additional external trigger cycles.
    std::vector<std::uint64_t> trigger_cycles;
    unsigned expander_words_per_cycle = 1;
    std::array<std::array<ToneSettings, kTonesPerChannel>, kChannels> statics{};
    /// Feed-forward correction per channel in f_eps counts.
    std::array<std::int64_t, kChannels> feedforward_counts{};
    bool record_trace = true;
};

/// 40-bit power-up counter drawn from `seed`.
std::uint64_t random_power_up_counter(std::uint64_t seed);

struct ToneCycle {
    FreqWord freq;  // effective, including feed-forward
    FreqWord programmed;  // static + spline, before feed-forward
    PhaseWord phase;  // total phase at the cycle's first sample
    PhaseWord offset;  // phase offset + frame accumulator
    AmpWord amp;
    std::array<DdsSample, kSamplesPerCycle> samples{};
};

struct ChannelCycle {
    std::uint64_t cycle = 0;
    /// Global counter at the cycle's first sample.
    std::uint64_t counter = 0;
    std::uint8_t channel = 0;
    std::array<ToneCycle, kTonesPerChannel> tones{};
    std::array<std::uint16_t, kParameters> fifo{};
};

struct Trace {
    std::uint64_t power_up_counter = 0;
    std::vector<int> channels;
    std::uint64_t cycles = 0;
    std::vector<std::uint64_t> triggers;
    /// One row per cycle and active channel, cycle-major.
    std::vector<ChannelCycle> rows;
};

class Machine {
public:
    /// `channels` lists the active channels; channels addressed by records
    /// are added automatically.
    Machine(std::vector<Word256> records, MachineConfig config, std::span<const int> channels = {});

    /// Advances one sequencer cycle. Throws SimulationFault on FIFO underflow.
    void step();
    /// Steps until done() or `max_cycles` cycles have elapsed.
    void run(std::uint64_t max_cycles);

    /// No records in flight, no words queued, every engine idle.
    bool done() const;
    std::uint64_t cycle() const { return cycle_; }
    const GlobalCounter& counter() const { return counter_; }
    const ChannelState& channel_state(int c) const { return states_[c]; }
    const SplineEngine& engine(int c, Parameter p) const { return engines_[c][std::size_t(p)]; }
    const std::vector<int>& channels() const { return channels_; }
    const Trace& trace() const { return trace_; }
    Trace take_trace() { return std::move(trace_); }

private:
    bool channel_exhausted(int c) const;
    bool trigger_ready() const;
    void deliver();
    void arbitrate();
    void update_parameters(int c, const std::array<SplineEngine::Output, kParameters>& out);

    MachineConfig config_;
    std::vector<int> channels_;
    std::array<std::deque<Word256>, kChannels> inbox_;
    std::array<std::int64_t, kChannels> credit_{};
    std::vector<ChannelSequencer> sequencers_;
    std::array<std::deque<SplineWord>, kChannels> queue_;
    std::array<std::array<SplineEngine, kParameters>, kChannels> engines_;
    std::array<ChannelState, kChannels> states_{};
    std::array<bool, kChannels> closed_{};
    GlobalCounter counter_;
    std::uint64_t cycle_ = 0;
    std::size_t next_trigger_ = 0;
    Trace trace_;
};

/// Runs a compiled record stream to completion (or `max_cycles`).
Trace simulate(std::span<const Word256> records, const MachineConfig& config,
               std::uint64_t max_cycles, std::span<const int> channels = {});

}  // namespace rfseq
