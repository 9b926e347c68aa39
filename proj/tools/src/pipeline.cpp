#include "rfseq_tools/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "rfseq/error.hpp"
#include "rfseq/format.hpp"
#include "rfseq/qubit.hpp"

namespace rfseq::tools {

using nlohmann::json;

namespace {

// Gap between the two power-up counters verify compares.
constexpr std::uint64_t kSecondSeedSalt = 0x9e3779b97f4a7c15ull;

std::int64_t feedforward_counts(const ProgramFile& pf)
{
    if (!pf.feedforward)
        return 0;
    const auto& ff = *pf.feedforward;
    return correction_counts(feedforward_correction(ff.monitor_drift_hz, ff.config, ff.sign));
}

const ToneCycle* tone_at(const Trace& t, std::size_t first, const TonePick& p)
{
    for (std::size_t i = first; i < first + t.channels.size(); i++)
        if (t.rows[i].channel == p.channel)
            return &t.rows[i].tones[p.tone];
    return nullptr;
}

}  // namespace

std::uint64_t power_up_counter(const SimOptions& o)
{
    return o.pin_counter ? (*o.pin_counter & kWordMask) : random_power_up_counter(o.seed);
}

MachineConfig machine_config(const ProgramFile& pf, std::uint64_t counter)
{
    MachineConfig cfg;
    cfg.power_up_counter = counter;
    cfg.feedforward_counts.fill(feedforward_counts(pf));
    return cfg;
}

CompiledProgram compile(const ProgramFile& pf)
{
    return compile_program(pf.program, pf.lut_strategy);
}

json compile_report_json(const ProgramFile& pf, const CompiledProgram& c)
{
    auto r = compression_report(c);
    json plut = json::array(), mlut = json::array();
    for (int ch : r.channels) {
        plut.push_back({{"channel", ch}, {"used", r.plut[ch].used}, {"capacity", r.plut[ch].capacity}});
        mlut.push_back({{"channel", ch}, {"used", r.mlut[ch].used}, {"capacity", r.mlut[ch].capacity}});
    }
    auto t = streaming_time_model(c.records);
    return {
        {"program", pf.name},
        {"channels", r.channels},
        {"gates", c.program.gates.size()},
        {"sequence_length", c.program.sequence.size()},
        {"segments", r.segments},
        {"words",
         {{"programming", r.words_programming},
          {"sequence", r.words_sequence},
          {"total", r.words_programming + r.words_sequence},
          {"streaming_equivalent", r.words_streaming_equivalent}}},
        {"compression_ratio", r.compression_ratio},
        {"compression_ratio_with_programming", r.compression_ratio_with_programming},
        {"luts", {{"plut", plut}, {"mlut", mlut}, {"glut", {{"used", r.glut.used}, {"capacity", r.glut.capacity}}}}},
        {"transfer", {{"rounds", t.rounds}, {"ns", t.total_ns}}},
    };
}

json timing_report_json(const CompiledProgram& c)
{
    auto lut = streaming_time_model(c.records);
    auto streamed = streaming_time_model(c.program);
    json gates = json::array();
    for (const auto& g : streamed.gates)
        gates.push_back({{"index", g.sequence_index},
                         {"gate", c.program.gates[c.program.sequence[g.sequence_index]].name},
                         {"words", g.words},
                         {"supply_ns", g.supply_ns},
                         {"consumption_ns", g.consumption_ns},
                         {"underflow_risk", g.underflow_risk}});
    return {
        {"record_rate_hz", kPerChannelRecordRateHz},
        {"lut_transfer", {{"rounds", lut.rounds}, {"ns", lut.total_ns}}},
        {"pure_streaming", {{"rounds", streamed.rounds}, {"ns", streamed.total_ns}, {"underflow_risk", streamed.underflow_risk}}},
        {"min_streamed_bits_per_gate", kMinStreamedBitsPerGate},
        {"gates", gates},
    };
}

std::vector<IqSample> channel_envelope(const Trace& t, int channel)
{
    std::vector<IqSample> out;
    for (const auto& row : t.rows) {
        if (row.channel != channel)
            continue;
        IqSample s;
        for (const auto& tone : row.tones) {
            s.i += tone.samples[0].quadrature;
            s.q += tone.samples[0].value;
        }
        out.push_back(s);
    }
    return out;
}

SimulationResult simulate_program(const ProgramFile& pf, const CompiledProgram& c, const SimOptions& o)
{
    Machine m(c.records, machine_config(pf, power_up_counter(o)), c.program.channels);
    const std::uint64_t cap = o.max_cycles ? o.max_cycles : kDefaultCycleCap;
    m.run(cap);
    SimulationResult r;
    r.finished = m.done();
    r.trace = m.take_trace();
    if (!r.finished && o.max_cycles == 0)
        r.warnings.push_back("stopped at the cycle cap before the program finished");
    for (auto& w : ms_triplet_lint(pf, r.trace))
        r.warnings.push_back(std::move(w));
    if (pf.xtalk) {
        std::vector<std::vector<IqSample>> raw(kChannels);
        for (int ch : r.trace.channels)
            raw[ch] = channel_envelope(r.trace, ch);
        auto comp = apply_crosstalk_compensation(raw, *pf.xtalk);
        for (int ch : r.trace.channels)
            r.compensated.push_back(std::move(comp[ch]));
    }
    return r;
}

std::vector<std::string> sync_lint(const CompiledProgram& c)
{
    struct Pulse {
        std::size_t position;
        std::uint64_t epoch;
        bool synced;
    };
    std::vector<std::string> issues;
    const auto& p = c.program;
    for (int ch : p.channels) {
        for (int k = 0; k < kTonesPerChannel; k++) {
            std::optional<std::uint64_t> cur;
            std::uint64_t epoch = 0;
            std::map<std::uint64_t, std::vector<Pulse>> pulses;
            for (std::size_t pos = 0; pos < p.sequence.size(); pos++) {
                const auto& g = p.gates[p.sequence[pos]];
                bool pulse = false, synced = false;
                std::optional<std::uint64_t> freq;
                for (const auto& w : g.words) {
                    if (w.meta.channel != ch || tone_of(w.meta.parameter) != k || w.meta.hold)
                        continue;
                    synced = synced || w.meta.sync;
                    auto kind = kind_of(w.meta.parameter);
                    if (kind == ParamKind::Freq && !freq)
                        freq = w.coeffs[0];
                    if (kind == ParamKind::Amp && std::any_of(w.coeffs.begin(), w.coeffs.end(), [](auto v) { return v != 0; }))
                        pulse = true;
                }
                if (freq && freq != cur) {
                    cur = freq;
                    epoch++;
                }
                if (pulse && cur)
                    pulses[*cur].push_back({pos, epoch, synced});
            }
            for (const auto& [f, list] : pulses) {
                bool reused = false;
                for (std::size_t i = 1; i < list.size(); i++)
                    reused = reused || list[i].epoch != list[i - 1].epoch;
                if (!reused)
                    continue;
                for (const auto& pl : list) {
                    if (pl.synced)
                        continue;
                    std::ostringstream os;
                    os << "gate '" << p.gates[p.sequence[pl.position]].name << "' at sequence position "
                       << pl.position << " (channel " << ch << ", tone " << k << ") plays "
                       << word_to_freq(FreqWord(f)) << " Hz, a frequency that is re-used after a frequency "
                       << "change, without a synchronization operation; every pulse that re-uses an rf "
                          "frequency and phase must be synchronized";
                    issues.push_back(os.str());
                }
            }
        }
    }
    return issues;
}

std::vector<std::string> feedforward_lint(const ProgramFile& pf, const CompiledProgram& c)
{
    std::vector<std::string> issues;
    const auto& p = c.program;
    bool any_flag = pf.feedforward.has_value();
    for (const auto& g : p.gates)
        for (const auto& w : g.words)
            any_flag = any_flag || w.meta.feedforward_enable;
    if (!any_flag)
        return issues;
    for (const auto& decl : pf.raman) {
        for (const auto& g : p.gates) {
            RamanGroup group;
            group.role = decl.role;
            group.sign = decl.sign;
            std::vector<bool> enabled;
            bool complete = true;
            for (const auto& t : decl.tones) {
                auto fp = make_parameter(t.tone, ParamKind::Freq);
                const SplineWord* first = nullptr;
                bool ff = false;
                for (const auto& w : g.words)
                    if (w.meta.channel == t.channel && w.meta.parameter == fp && !w.meta.hold) {
                        if (!first)
                            first = &w;
                        ff = ff || w.meta.feedforward_enable;
                    }
                if (!first) {
                    complete = false;
                    break;
                }
                group.tones.push_back({t.channel, t.tone, word_to_freq(FreqWord(first->coeffs[0]))});
                enabled.push_back(ff);
            }
            if (!complete)
                continue;
            for (auto& issue : lint_feedforward(group, enabled))
                issues.push_back("gate '" + g.name + "': " + issue);
        }
    }
    return issues;
}

std::vector<std::string> ms_triplet_lint(const ProgramFile& pf, const Trace& t)
{
    std::vector<std::string> issues;
    const std::size_t per = t.channels.size();
    for (const auto& m : pf.ms_triplets) {
        FreqWord carrier;
        try {
            carrier = freq_to_word(m.carrier_hz);
        }
        catch (const Error& e) {
            issues.push_back(std::string("MS triplet carrier: ") + e.what());
            continue;
        }
        for (std::size_t first = 0; per && first + per <= t.rows.size(); first += per) {
            const auto* red = tone_at(t, first, m.red);
            const auto* blue = tone_at(t, first, m.blue);
            if (!red || !blue || red->amp.value == 0 || blue->amp.value == 0)
                continue;
            auto a = validate_ms_triplet({carrier, red->programmed, blue->programmed});
            if (a.aligned)
                continue;
            std::ostringstream os;
            os << "MS triplet misaligned from cycle " << t.rows[first].cycle << ": 2*carrier - (red + blue) = "
               << a.epsilon_mismatch << " f_eps (carrier " << carrier.value << ", red " << red->programmed.value
               << ", blue " << blue->programmed.value << "); the sideband beat note drifts by "
               << 2 * std::numbers::pi * double(std::llabs(a.epsilon_mismatch)) * kFepsHz
               << " rad/s against the carrier";
            issues.push_back(os.str());
            break;
        }
    }
    return issues;
}

bool VerifyReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json VerifyReport::to_json() const
{
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"passed", passed()}, {"checks", arr}};
}

VerifyReport verify_program(const ProgramFile& pf, const SimOptions& o)
{
    VerifyReport rep;
    auto add = [&](std::string name, bool ok, std::string detail) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v)
            s += (s.empty() ? "" : "; ") + x;
        return s;
    };

    CompiledProgram c;
    try {
        c = compile(pf);
        add("compile", true, std::to_string(c.records.size()) + " records");
    }
    catch (const Error& e) {
        add("compile", false, e.what());
        return rep;
    }

    auto sync = sync_lint(c);
    add("sync_rule", sync.empty(), join(sync));
    if (!pf.raman.empty()) {
        auto ff = feedforward_lint(pf, c);
        add("feedforward_routing", ff.empty(), join(ff));
    }

    SimOptions a = o, b = o;
    b.pin_counter = random_power_up_counter(o.seed ^ kSecondSeedSalt);
    if (b.pin_counter == power_up_counter(a))
        b.pin_counter = (*b.pin_counter + 1) & kWordMask;
    SimulationResult ra, rb;
    try {
        ra = simulate_program(pf, c, a);
        rb = simulate_program(pf, c, b);
        add("simulate", ra.finished && rb.finished,
            ra.finished ? std::to_string(ra.trace.cycles) + " cycles" : "did not finish within the cycle limit");
    }
    catch (const SimulationFault& e) {
        add("simulate", false, e.what());
        return rep;
    }

    if (!pf.ms_triplets.empty()) {
        auto ms = ms_triplet_lint(pf, ra.trace);
        add("ms_triplet", ms.empty(), join(ms));
    }

    std::vector<double> p1;
    for (std::size_t i = 0; i < pf.raman.size(); i++) {
        if (pf.raman[i].role != RamanRole::SingleQubit) {
            p1.push_back(std::nan(""));
            continue;
        }
        auto spec = pair_spec(pf.raman[i]);
        auto sync_rep = verify_phase_sync(ra.trace, spec);
        std::ostringstream os;
        os << sync_rep.pulses.size() << " pulses, max axis deviation " << sync_rep.max_axis_deviation << " rad";
        add("phase_sync[" + std::to_string(i) + "]", sync_rep.max_axis_deviation < 1e-6, os.str());

        double pa = run_trace(ra.trace, spec).p1();
        double pb = run_trace(rb.trace, spec).p1();
        std::ostringstream os2;
        os2 << "P(1) = " << pa << " (counter " << ra.trace.power_up_counter << "), " << pb << " (counter "
            << rb.trace.power_up_counter << ")";
        add("power_up_independence[" + std::to_string(i) + "]", std::fabs(pa - pb) < 1e-9, os2.str());
        p1.push_back(pa);
    }

    if (pf.expect.p1) {
        const auto i = pf.expect.p1_pair;
        if (i >= p1.size() || std::isnan(p1[i])) {
            add("expect_p1", false, "expect.p1_pair does not name a single-qubit Raman pair");
        }
        else {
            std::ostringstream os;
            os << "P(1) = " << p1[i] << ", expected " << *pf.expect.p1 << " +/- " << pf.expect.p1_tolerance;
            add("expect_p1", std::fabs(p1[i] - *pf.expect.p1) <= pf.expect.p1_tolerance, os.str());
        }
    }
    if (pf.expect.plut_entries) {
        std::size_t used = c.segments.empty() ? 0 : c.segments.front().library.channels[pf.expect.plut_channel].plut.size();
        add("expect_plut_entries", used == *pf.expect.plut_entries,
            std::to_string(used) + " PLUT entries on channel " + std::to_string(pf.expect.plut_channel) +
                ", expected " + std::to_string(*pf.expect.plut_entries));
    }
    return rep;
}

void write_records(std::ostream& os, const std::vector<Word256>& records)
{
    for (const auto& r : records) {
        std::array<std::uint8_t, Word256::kBytes> b{};
        r.to_bytes(b);
        os.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
    }
}

std::vector<Word256> read_records(std::istream& is)
{
    std::vector<Word256> out;
    std::array<std::uint8_t, Word256::kBytes> b{};
    while (is.read(reinterpret_cast<char*>(b.data()), std::streamsize(b.size())))
        out.push_back(Word256::from_bytes(b));
    if (is.gcount() != 0)
        throw ValidationError("record file length is not a multiple of 32 bytes");
    return out;
}

}  // namespace rfseq::tools
