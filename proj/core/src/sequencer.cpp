#include "rfseq/sequencer.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rfseq/error.hpp"

namespace rfseq {

using namespace format;

namespace {

using Key = std::pair<int, Parameter>;

bool contains(std::span<const int> channels, int c)
{
    return std::find(channels.begin(), channels.end(), c) != channels.end();
}

bool is_streamed(const GateDefinition& g, int channel, Parameter p)
{
    return std::find(g.streamed.begin(), g.streamed.end(), Key{channel, p}) != g.streamed.end();
}

[[noreturn]] void capacity_error(const std::string& table, int channel, std::size_t required,
                                 std::size_t limit, const std::string& gate)
{
    std::ostringstream os;
    os << table << " capacity exceeded";
    if (channel >= 0)
        os << " on channel " << channel;
    os << ": " << required << " entries needed, " << limit << " available";
    if (!gate.empty())
        os << " (while adding gate '" << gate << "')";
    os << ". Stream some parameters directly instead of storing them, or compile with "
          "LUT reprogramming between gates.";
    throw CapacityError(table, required, limit, os.str());
}

Word256 header(RecordType t, int channel)
{
    Word256 w;
    w.set(kTypeLo, kTypeBits, std::uint64_t(t));
    w.set(kChannelLo, kChannelBits, std::uint64_t(channel));
    return w;
}

std::vector<Word256> programming_records(int channel, const ChannelLuts& luts)
{
    std::vector<Word256> out;
    for (std::size_t a = 0; a < luts.plut.size(); a++)
        out.push_back(encode(luts.plut[a], std::uint16_t(a)));
    for (std::size_t base = 0; base < luts.mlut.size(); base += kMlutMaxEntries) {
        auto n = std::min<std::size_t>(kMlutMaxEntries, luts.mlut.size() - base);
        Word256 w = header(RecordType::MlutProgram, channel);
        for (std::size_t i = 0; i < n; i++)
            w.set(unsigned(kMlutEntryBits * i), kMlutEntryBits, luts.mlut[base + i]);
        w.set(kMlutBaseLo, kMlutBaseBits, base);
        w.set(kMlutCountLo, kMlutCountBits, n);
        out.push_back(w);
    }
    std::vector<std::size_t> bound;
    for (std::size_t g = 0; g < luts.glut.size(); g++)
        if (luts.glut[g])
            bound.push_back(g);
    for (std::size_t i = 0; i < bound.size(); i += kGlutMaxEntries) {
        auto n = std::min<std::size_t>(kGlutMaxEntries, bound.size() - i);
        Word256 w = header(RecordType::GlutProgram, channel);
        for (std::size_t k = 0; k < n; k++) {
            auto gid = bound[i + k];
            auto [start, stop] = *luts.glut[gid];
            std::uint64_t entry = gid | (std::uint64_t(start) << 6) | (std::uint64_t(stop) << 18);
            w.set(unsigned(kGlutEntryBits * k), kGlutEntryBits, entry);
        }
        w.set(kGlutCountLo, kGlutCountBits, n);
        out.push_back(w);
    }
    return out;
}

}  // namespace

std::uint64_t gate_duration(const GateDefinition& g)
{
    if (g.words.empty())
        return 0;
    const auto& first = g.words.front().meta;
    std::uint64_t total = 0;
    for (const auto& w : g.words)
        if (w.meta.channel == first.channel && w.meta.parameter == first.parameter)
            total += w.duration;
    return total;
}

GateDefinition normalize_gate(const GateDefinition& g, std::span<const int> channels)
{
    if (g.words.empty())
        throw ValidationError("gate '" + g.name + "' has no words");
    std::map<Key, std::vector<SplineWord>> by_engine;
    for (const auto& w : g.words) {
        if (!contains(channels, w.meta.channel))
            throw ValidationError("gate '" + g.name + "' uses undeclared channel " +
                                  std::to_string(w.meta.channel));
        if (w.duration == 0)
            throw ValidationError("gate '" + g.name + "' has a zero-duration word");
        by_engine[{w.meta.channel, w.meta.parameter}].push_back(w);
    }
    for (const auto& [c, p] : g.streamed)
        if (!contains(channels, c))
            throw ValidationError("gate '" + g.name + "' streams undeclared channel " + std::to_string(c));

    std::optional<std::uint64_t> total;
    for (const auto& [key, ws] : by_engine) {
        std::uint64_t sum = 0;
        for (const auto& w : ws)
            sum += w.duration;
        if (total && *total != sum) {
            std::ostringstream os;
            os << "gate '" << g.name << "': durations of channel " << key.first << " "
               << parameter_name(key.second) << " sum to " << sum << " cycles, other parameters to "
               << *total;
            throw ValidationError(os.str());
        }
        total = sum;
    }

    bool any_frame = false, only_frame = true;
    for (const auto& [key, ws] : by_engine)
        for (const auto& w : ws) {
            if (w.meta.hold)
                continue;
            if (kind_of(key.second) == ParamKind::Frame)
                any_frame = true;
            else
                only_frame = false;
        }
    if (any_frame && only_frame && *total < min_frame_rotation_duration()) {
        std::ostringstream os;
        os << "gate '" << g.name << "': a standalone frame rotation needs at least "
           << min_frame_rotation_duration() << " cycles, got " << *total;
        throw ValidationError(os.str());
    }

    for (int c : channels)
        for (int p = 0; p < kParameters; p++) {
            auto& ws = by_engine[{c, Parameter(p)}];
            if (ws.empty())
                ws.push_back(hold_word(Parameter(p), *total, std::uint8_t(c)));
        }

    struct Placed {
        std::uint64_t start;
        SplineWord word;
    };
    std::vector<Placed> placed;
    for (auto& [key, ws] : by_engine) {
        std::uint64_t t = 0;
        for (std::size_t i = 0; i < ws.size(); i++) {
            SplineWord w = ws[i];
            if (i == 0 && g.wait_for_trigger)
                w.meta.wait_for_trigger = true;
            placed.push_back({t, w});
            t += w.duration;
        }
    }
    std::stable_sort(placed.begin(), placed.end(), [](const Placed& a, const Placed& b) {
        if (a.start != b.start)
            return a.start < b.start;
        if (a.word.meta.channel != b.word.meta.channel)
            return a.word.meta.channel < b.word.meta.channel;
        return a.word.meta.parameter < b.word.meta.parameter;
    });

    GateDefinition out;
    out.name = g.name;
    out.streamed = g.streamed;
    std::sort(out.streamed.begin(), out.streamed.end());
    out.streamed.erase(std::unique(out.streamed.begin(), out.streamed.end()), out.streamed.end());
    out.wait_for_trigger = g.wait_for_trigger;
    for (auto& pl : placed)
        out.words.push_back(pl.word);
    return out;
}

GateProgram normalize_program(const GateProgram& p)
{
    GateProgram out;
    out.channels = p.channels;
    std::sort(out.channels.begin(), out.channels.end());
    out.channels.erase(std::unique(out.channels.begin(), out.channels.end()), out.channels.end());
    if (out.channels.empty())
        throw ValidationError("program declares no channels");
    for (int c : out.channels)
        if (c < 0 || c >= kChannels)
            throw ValidationError("channel " + std::to_string(c) + " out of range [0, 8)");
    for (const auto& g : p.gates)
        out.gates.push_back(normalize_gate(g, out.channels));
    for (auto idx : p.sequence)
        if (idx >= out.gates.size())
            throw ValidationError("sequence references undefined gate index " + std::to_string(idx));
    out.sequence = p.sequence;
    return out;
}

CompiledLibrary compile_library(std::span<const GateDefinition> gates, std::span<const int> channels)
{
    if (gates.size() > kGlutDepth)
        capacity_error("GLUT", -1, gates.size(), kGlutDepth, gates[kGlutDepth].name);
    CompiledLibrary out;
    out.library.gate_count = gates.size();
    for (int c : channels) {
        auto& luts = out.library.channels[c];
        luts.glut.assign(gates.size(), std::nullopt);
        std::unordered_map<Word256, std::uint16_t, Word256Hash> index;
        for (std::size_t gid = 0; gid < gates.size(); gid++) {
            const auto& gate = gates[gid];
            std::optional<std::uint16_t> start;
            for (const auto& w : gate.words) {
                if (w.meta.channel != c || is_streamed(gate, c, w.meta.parameter))
                    continue;
                Word256 key = encode(w);
                auto it = index.find(key);
                std::uint16_t addr;
                if (it == index.end()) {
                    if (luts.plut.size() >= kPlutDepth)
                        capacity_error("PLUT", c, luts.plut.size() + 1, kPlutDepth, gate.name);
                    addr = std::uint16_t(luts.plut.size());
                    index.emplace(key, addr);
                    luts.plut.push_back(w);
                }
                else {
                    addr = it->second;
                }
                if (luts.mlut.size() >= kMlutDepth)
                    capacity_error("MLUT", c, luts.mlut.size() + 1, kMlutDepth, gate.name);
                if (!start)
                    start = std::uint16_t(luts.mlut.size());
                luts.mlut.push_back(addr);
            }
            if (start)
                luts.glut[gid] = {*start, std::uint16_t(luts.mlut.size() - 1)};
        }
        auto recs = programming_records(c, luts);
        out.programming.insert(out.programming.end(), recs.begin(), recs.end());
    }
    return out;
}

std::vector<Word256> encode_sequence(std::span<const std::uint8_t> ids)
{
    std::vector<Word256> out;
    for (std::size_t i = 0; i < ids.size(); i += kGateIdsPerWord) {
        auto n = std::min<std::size_t>(kGateIdsPerWord, ids.size() - i);
        Word256 w = header(RecordType::GateSequence, 0);
        w.set_bit(kBroadcastBit, true);
        for (std::size_t k = 0; k < n; k++) {
            if (ids[i + k] >= kGlutDepth)
                throw ValidationError("gate id " + std::to_string(ids[i + k]) + " does not fit 6 bits");
            w.set(unsigned(kGateIdBits * k), kGateIdBits, ids[i + k]);
        }
        w.set(kSeqCountLo, kSeqCountBits, n);
        out.push_back(w);
    }
    return out;
}

std::vector<std::uint8_t> decode_sequence(const Word256& w)
{
    if (RecordType(w.get(kTypeLo, kTypeBits)) != RecordType::GateSequence)
        throw ValidationError("record is not a gate sequence");
    auto n = w.get(kSeqCountLo, kSeqCountBits);
    if (n == 0 || n > kGateIdsPerWord)
        throw ValidationError("gate sequence record has an invalid id count");
    std::vector<std::uint8_t> ids(n);
    for (std::size_t k = 0; k < n; k++)
        ids[k] = std::uint8_t(w.get(unsigned(kGateIdBits * k), kGateIdBits));
    return ids;
}

std::vector<Word256> emit_sequence(std::span<const GateDefinition> gates,
                                   std::span<const std::size_t> sequence)
{
    std::vector<Word256> out;
    std::vector<std::uint8_t> pending;
    auto flush = [&] {
        auto ws = encode_sequence(pending);
        out.insert(out.end(), ws.begin(), ws.end());
        pending.clear();
    };
    for (auto idx : sequence) {
        if (idx >= gates.size() || idx >= kGlutDepth)
            throw ValidationError("gate id " + std::to_string(idx) + " is not bound");
        pending.push_back(std::uint8_t(idx));
        const auto& g = gates[idx];
        if (!g.streamed.empty()) {
            flush();
            for (const auto& w : g.words)
                if (is_streamed(g, w.meta.channel, w.meta.parameter))
                    out.push_back(encode(w));
        }
        else if (pending.size() == kGateIdsPerWord) {
            flush();
        }
    }
    if (!pending.empty())
        flush();
    return out;
}

std::vector<Word256> stream_program(const GateProgram& p)
{
    std::vector<Word256> out;
    for (auto idx : p.sequence)
        for (const auto& w : p.gates.at(idx).words)
            out.push_back(encode(w));
    return out;
}

ChannelSequencer::ChannelSequencer(int channel)
    : channel_(channel), plut_(kPlutDepth), mlut_(kMlutDepth), glut_(kGlutDepth)
{
}

void ChannelSequencer::ingest(const Word256& rec, std::vector<SplineWord>& out)
{
    auto type = RecordType(rec.get(kTypeLo, kTypeBits));
    const bool mine = int(rec.get(kChannelLo, kChannelBits)) == channel_;
    switch (type) {
    case RecordType::SplineData:
        if (mine)
            out.push_back(decode_spline(rec));
        break;
    case RecordType::PlutProgram:
        if (mine)
            plut_[rec.get(kPlutAddrLo, kPlutAddrBits)] = decode_spline(rec);
        break;
    case RecordType::MlutProgram:
        if (mine) {
            auto base = rec.get(kMlutBaseLo, kMlutBaseBits);
            auto n = rec.get(kMlutCountLo, kMlutCountBits);
            if (n == 0 || n > kMlutMaxEntries || base + n > kMlutDepth)
                throw ValidationError("malformed MLUT programming record");
            for (std::size_t i = 0; i < n; i++)
                mlut_[base + i] = std::uint16_t(rec.get(unsigned(kMlutEntryBits * i), kMlutEntryBits));
        }
        break;
    case RecordType::GlutProgram:
        if (mine) {
            auto n = rec.get(kGlutCountLo, kGlutCountBits);
            if (n == 0 || n > kGlutMaxEntries)
                throw ValidationError("malformed GLUT programming record");
            for (std::size_t i = 0; i < n; i++) {
                auto e = rec.get(unsigned(kGlutEntryBits * i), kGlutEntryBits);
                auto gid = e & 0x3f;
                auto start = std::uint16_t((e >> 6) & 0xfff), stop = std::uint16_t((e >> 18) & 0xfff);
                if (stop < start)
                    throw ValidationError("GLUT entry with stop < start");
                glut_[gid] = {start, stop};
            }
        }
        break;
    case RecordType::GateSequence:
        if (mine || rec.bit(kBroadcastBit))
            for (auto id : decode_sequence(rec))
                expand_gate(id, out);
        break;
    case RecordType::Nop:
        break;
    default:
        throw ValidationError("unknown record type " + std::to_string(int(type)));
    }
}

void ChannelSequencer::expand_gate(std::uint8_t id, std::vector<SplineWord>& out) const
{
    if (!glut_[id])
        return;
    auto [start, stop] = *glut_[id];
    for (std::size_t i = start; i <= stop; i++) {
        if (!mlut_[i])
            throw ValidationError("MLUT entry " + std::to_string(i) + " is not programmed");
        const auto& w = plut_[*mlut_[i]];
        if (!w)
            throw ValidationError("PLUT entry " + std::to_string(*mlut_[i]) + " is not programmed");
        out.push_back(*w);
    }
}

ChannelLuts ChannelSequencer::luts() const
{
    ChannelLuts l;
    for (const auto& w : plut_) {
        if (!w)
            break;
        l.plut.push_back(*w);
    }
    for (const auto& m : mlut_) {
        if (!m)
            break;
        l.mlut.push_back(*m);
    }
    std::size_t last = 0;
    for (std::size_t g = 0; g < glut_.size(); g++)
        if (glut_[g])
            last = g + 1;
    l.glut.assign(glut_.begin(), glut_.begin() + std::ptrdiff_t(last));
    return l;
}

FifoStreams expand(std::span<const Word256> records, const GateLibrary& library)
{
    std::vector<ChannelSequencer> seqs;
    for (int c = 0; c < kChannels; c++) {
        seqs.emplace_back(c);
        for (auto& rec : programming_records(c, library.channels[c])) {
            std::vector<SplineWord> unused;
            seqs.back().ingest(rec, unused);
        }
    }
    FifoStreams streams;
    std::vector<SplineWord> out;
    for (const auto& rec : records) {
        if (RecordType(rec.get(kTypeLo, kTypeBits)) == RecordType::GateSequence) {
            for (auto id : decode_sequence(rec)) {
                bool bound = std::any_of(seqs.begin(), seqs.end(),
                                         [&](const ChannelSequencer& s) { return s.gate_bound(id); });
                if (!bound)
                    throw ValidationError("gate id " + std::to_string(id) + " is not bound in any GLUT");
            }
        }
        for (auto& s : seqs) {
            out.clear();
            s.ingest(rec, out);
            for (const auto& w : out)
                streams[s.channel()][std::size_t(w.meta.parameter)].push_back(w);
        }
    }
    return streams;
}

FifoStreams route_streamed(std::span<const Word256> records)
{
    FifoStreams streams;
    for (const auto& rec : records) {
        auto w = decode_spline(rec);
        streams[w.meta.channel][std::size_t(w.meta.parameter)].push_back(w);
    }
    return streams;
}

CompiledProgram compile_program(const GateProgram& p, LutStrategy strategy)
{
    CompiledProgram out;
    out.program = normalize_program(p);
    const auto& np = out.program;

    auto build_segment = [&](std::vector<std::size_t> gate_ids, std::size_t begin, std::size_t end) {
        ProgramSegment seg;
        seg.gate_ids = std::move(gate_ids);
        seg.sequence_begin = begin;
        seg.sequence_end = end;
        std::vector<GateDefinition> local;
        std::map<std::size_t, std::size_t> to_local;
        for (auto g : seg.gate_ids) {
            to_local[g] = local.size();
            local.push_back(np.gates[g]);
        }
        auto lib = compile_library(local, np.channels);
        std::vector<std::size_t> seq;
        for (std::size_t i = begin; i < end; i++)
            seq.push_back(to_local.at(np.sequence[i]));
        auto seq_words = emit_sequence(local, seq);
        seg.library = std::move(lib.library);
        seg.programming_words = lib.programming.size();
        seg.sequence_words = seq_words.size();
        out.records.insert(out.records.end(), lib.programming.begin(), lib.programming.end());
        out.records.insert(out.records.end(), seq_words.begin(), seq_words.end());
        out.segments.push_back(std::move(seg));
    };

    if (strategy == LutStrategy::Fail) {
        std::vector<std::size_t> all(np.gates.size());
        std::iota(all.begin(), all.end(), 0);
        build_segment(std::move(all), 0, np.sequence.size());
        return out;
    }

    // Greedy segmentation: grow the set of distinct gates until one more
    // would overflow a table.
    struct Usage {
        std::array<std::unordered_set<Word256, Word256Hash>, kChannels> plut;
        std::array<std::size_t, kChannels> mlut{};
        std::vector<std::size_t> gates;
    };
    auto fits_with = [&](const Usage& u, std::size_t g, Usage& next) {
        next = u;
        next.gates.push_back(g);
        if (next.gates.size() > kGlutDepth)
            return false;
        const auto& gate = np.gates[g];
        for (const auto& w : gate.words) {
            int c = w.meta.channel;
            if (is_streamed(gate, c, w.meta.parameter))
                continue;
            next.plut[c].insert(encode(w));
            next.mlut[c]++;
            if (next.plut[c].size() > kPlutDepth || next.mlut[c] > kMlutDepth)
                return false;
        }
        return true;
    };

    Usage cur;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < np.sequence.size(); i++) {
        auto g = np.sequence[i];
        if (std::find(cur.gates.begin(), cur.gates.end(), g) != cur.gates.end())
            continue;
        Usage next;
        if (fits_with(cur, g, next)) {
            cur = std::move(next);
            continue;
        }
        if (cur.gates.empty()) {
            // Alone it still does not fit; let compile_library report which table.
            compile_library(std::span(&np.gates[g], 1), np.channels);
        }
        build_segment(cur.gates, begin, i);
        begin = i;
        cur = Usage{};
        if (!fits_with(cur, g, next))
            compile_library(std::span(&np.gates[g], 1), np.channels);
        cur = std::move(next);
    }
    if (begin < np.sequence.size() || out.segments.empty())
        build_segment(cur.gates, begin, np.sequence.size());
    return out;
}

CompileReport compression_report(const CompiledProgram& c)
{
    CompileReport r;
    r.channels = c.program.channels;
    r.segments = c.segments.size();
    for (const auto& seg : c.segments) {
        r.words_programming += seg.programming_words;
        r.words_sequence += seg.sequence_words;
        for (int ch : c.program.channels) {
            const auto& l = seg.library.channels[ch];
            r.plut[ch].used = std::max(r.plut[ch].used, l.plut.size());
            r.mlut[ch].used = std::max(r.mlut[ch].used, l.mlut.size());
        }
        r.glut.used = std::max(r.glut.used, seg.library.gate_count);
    }
    for (int ch = 0; ch < kChannels; ch++) {
        r.plut[ch].capacity = kPlutDepth;
        r.mlut[ch].capacity = kMlutDepth;
    }
    r.glut.capacity = kGlutDepth;
    for (auto idx : c.program.sequence)
        r.words_streaming_equivalent += c.program.gates[idx].words.size();
    if (r.words_streaming_equivalent > 0) {
        r.compression_ratio = double(r.words_sequence) / double(r.words_streaming_equivalent);
        r.compression_ratio_with_programming =
            double(r.words_programming + r.words_sequence) / double(r.words_streaming_equivalent);
    }
    return r;
}

StreamingTiming streaming_time_model(std::span<const Word256> records)
{
    std::array<std::size_t, kChannels> slots{};
    for (const auto& rec : records) {
        auto type = RecordType(rec.get(kTypeLo, kTypeBits));
        if (type == RecordType::GateSequence && rec.bit(kBroadcastBit)) {
            for (auto& s : slots)
                s++;
        }
        else {
            slots[rec.get(kChannelLo, kChannelBits)]++;
        }
    }
    StreamingTiming t;
    t.rounds = *std::max_element(slots.begin(), slots.end());
    t.total_ns = double(t.rounds) / kPerChannelRecordRateHz * 1e9;
    return t;
}

StreamingTiming streaming_time_model(const GateProgram& p)
{
    StreamingTiming t;
    for (std::size_t i = 0; i < p.sequence.size(); i++) {
        const auto& g = p.gates.at(p.sequence[i]);
        std::array<std::size_t, kChannels> words{};
        for (const auto& w : g.words)
            words[w.meta.channel]++;
        GateTiming gt;
        gt.sequence_index = i;
        gt.words = *std::max_element(words.begin(), words.end());
        gt.supply_ns = double(gt.words) / kPerChannelRecordRateHz * 1e9;
        gt.consumption_ns = double(gate_duration(g)) / double(kSequencerClockHz) * 1e9;
        gt.underflow_risk = gt.supply_ns > gt.consumption_ns;
        t.underflow_risk = t.underflow_risk || gt.underflow_risk;
        t.rounds += gt.words;
        t.total_ns += gt.supply_ns;
        t.gates.push_back(gt);
    }
    return t;
}

}  // namespace rfseq
