#include "rfseq/playback.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rfseq/format.hpp"

namespace rfseq {

using namespace format;

namespace {

// 37.5 MHz / 409.6 MHz = 375 / 4096 record slots per cycle and channel.
constexpr std::int64_t kCreditPerCycle = 375;
constexpr std::int64_t kCreditPerRecord = 4096;

AmpWord scaled_amp(std::uint64_t engine_value, const ToneSettings& s)
{
    double a = (double(AmpWord::from_padded(engine_value).value) + s.amp_offset) * s.amp_scale;
    a = std::clamp(std::round(a), -double(AmpWord::kFullScale), double(AmpWord::kFullScale));
    return AmpWord(std::int16_t(a));
}

}  // namespace

std::uint64_t random_power_up_counter(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return rng() & kWordMask;
}

Machine::Machine(std::vector<Word256> records, MachineConfig config, std::span<const int> channels)
    : config_(std::move(config))
{
    std::array<bool, kChannels> active{};
    for (int c : channels)
        active[c] = true;
    for (const auto& r : records)
        if (!r.bit(kBroadcastBit))
            active[r.get(kChannelLo, kChannelBits)] = true;
    for (int c = 0; c < kChannels; c++) {
        sequencers_.emplace_back(c);
        if (active[c])
            channels_.push_back(c);
        credit_[c] = kCreditPerRecord;
        for (auto& e : engines_[c])
            e = SplineEngine(config_.idle);
    }
    for (const auto& r : records) {
        if (r.bit(kBroadcastBit)) {
            for (int c : channels_)
                inbox_[c].push_back(r);
        }
        else {
            inbox_[r.get(kChannelLo, kChannelBits)].push_back(r);
        }
    }
    std::sort(config_.trigger_cycles.begin(), config_.trigger_cycles.end());
    counter_.t = config_.power_up_counter & kWordMask;
    trace_.power_up_counter = counter_.t;
    trace_.channels = channels_;
}

bool Machine::channel_exhausted(int c) const
{
    return inbox_[c].empty() && queue_[c].empty();
}

bool Machine::done() const
{
    for (int c : channels_) {
        if (!channel_exhausted(c))
            return false;
        for (const auto& e : engines_[c])
            if (!e.idle())
                return false;
    }
    return true;
}

bool Machine::trigger_ready() const
{
    bool something_waits = false;
    for (int c : channels_) {
        bool stalled = channel_exhausted(c);
        if (!stalled && !queue_[c].empty()) {
            const auto& head = queue_[c].front();
            stalled = engines_[c][std::size_t(head.meta.parameter)].fifo_full();
        }
        if (!stalled)
            return false;
        for (const auto& e : engines_[c]) {
            if (e.awaiting_trigger()) {
                something_waits = something_waits || !e.idle();
            }
            else if (!e.idle()) {
                return false;
            }
        }
    }
    return something_waits;
}

void Machine::deliver()
{
    for (int c : channels_) {
        credit_[c] = std::min(credit_[c] + kCreditPerCycle, kCreditPerRecord);
        if (credit_[c] < kCreditPerRecord || inbox_[c].empty())
            continue;
        credit_[c] -= kCreditPerRecord;
        std::vector<SplineWord> words;
        sequencers_[c].ingest(inbox_[c].front(), words);
        inbox_[c].pop_front();
        queue_[c].insert(queue_[c].end(), words.begin(), words.end());
    }
}

void Machine::arbitrate()
{
    for (int c : channels_) {
        for (unsigned k = 0; k < config_.expander_words_per_cycle && !queue_[c].empty(); k++) {
            const auto& w = queue_[c].front();
            if (!engines_[c][std::size_t(w.meta.parameter)].push(w))
                break;
            queue_[c].pop_front();
        }
        if (channel_exhausted(c) && !closed_[c]) {
            for (auto& e : engines_[c])
                e.close_input();
            closed_[c] = true;
        }
    }
}

void Machine::update_parameters(int c, const std::array<SplineEngine::Output, kParameters>& out)
{
    auto& state = states_[c];
    state.feedforward_counts = config_.feedforward_counts[c];
    for (int k = 0; k < kTonesPerChannel; k++) {
        auto& tone = state.tones[k];
        const auto& s = config_.statics[c][k];
        const auto& f = out[std::size_t(make_parameter(k, ParamKind::Freq))];
        const auto& ph = out[std::size_t(make_parameter(k, ParamKind::Phase))];
        const auto& a = out[std::size_t(make_parameter(k, ParamKind::Amp))];
        tone.freq = FreqWord(s.freq.value + f.value);
        tone.phase_offset = PhaseWord(s.phase.value + ph.value);
        tone.amp = scaled_amp(a.value, s);
        tone.feedforward_sign = s.feedforward_sign;
        if (f.word_started && !f.meta.hold)
            tone.feedforward_enabled = f.meta.feedforward_enable;
        bool sync = false;
        for (auto kind : {ParamKind::Freq, ParamKind::Phase, ParamKind::Amp, ParamKind::Frame}) {
            const auto& o = out[std::size_t(make_parameter(k, kind))];
            sync = sync || (o.word_started && !o.meta.hold && o.meta.sync);
        }
        if (sync)
            sync_pulse(tone, counter_, state.feedforward_counts);
    }
}

void Machine::step()
{
    deliver();
    arbitrate();

    bool fire = false;
    while (next_trigger_ < config_.trigger_cycles.size() && config_.trigger_cycles[next_trigger_] <= cycle_) {
        fire = true;
        next_trigger_++;
    }
    if (config_.auto_trigger && trigger_ready())
        fire = true;
    if (fire) {
        for (int c : channels_)
            for (auto& e : engines_[c])
                e.trigger();
        trace_.triggers.push_back(cycle_);
    }

    std::array<std::array<SplineEngine::Output, kParameters>, kChannels> out{};
    for (int c : channels_)
        for (int p = 0; p < kParameters; p++)
            out[c][p] = engines_[c][p].step(cycle_, c, p);
    for (int c : channels_)
        update_parameters(c, out[c]);

    const std::size_t first_row = trace_.rows.size();
    if (config_.record_trace) {
        for (int c : channels_) {
            ChannelCycle row;
            row.cycle = cycle_;
            row.counter = counter_.t;
            row.channel = std::uint8_t(c);
            for (int p = 0; p < kParameters; p++)
                row.fifo[p] = std::uint16_t(engines_[c][p].fifo_size());
            for (int k = 0; k < kTonesPerChannel; k++) {
                const auto& tone = states_[c].tones[k];
                row.tones[k].freq = effective_frequency(tone, states_[c].feedforward_counts);
                row.tones[k].programmed = tone.freq;
                row.tones[k].amp = tone.amp;
                row.tones[k].offset = tone.phase_offset + tone.frame_acc;
            }
            trace_.rows.push_back(row);
        }
    }
    for (unsigned n = 0; n < kSamplesPerCycle; n++) {
        for (std::size_t i = 0; i < channels_.size(); i++) {
            auto samples = rfseq::step(states_[channels_[i]]);
            if (!config_.record_trace)
                continue;
            auto& row = trace_.rows[first_row + i];
            for (int k = 0; k < kTonesPerChannel; k++) {
                row.tones[k].samples[n] = samples[k];
                if (n == 0)
                    row.tones[k].phase = samples[k].phase_total;
            }
        }
        counter_.advance();
    }

    for (int c : channels_)
        for (int k = 0; k < kTonesPerChannel; k++) {
            const auto& o = out[c][std::size_t(make_parameter(k, ParamKind::Frame))];
            if (o.word_finished && !o.meta.hold)
                apply_frame_rotation(states_[c].tones[k], PhaseWord(o.value), o.meta.frame_mask);
        }

    cycle_++;
    trace_.cycles = cycle_;
}

void Machine::run(std::uint64_t max_cycles)
{
    while (cycle_ < max_cycles && !done())
        step();
}

Trace simulate(std::span<const Word256> records, const MachineConfig& config,
               std::uint64_t max_cycles, std::span<const int> channels)
{
    Machine m({records.begin(), records.end()}, config, channels);
    m.run(max_cycles);
    return m.take_trace();
}

}  // namespace rfseq
