#include "rfseq_tools/program_file.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rfseq::tools {

namespace {

class Parser {
public:
    explicit Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const
    {
        std::ostringstream os;
        os << source_;
        if (n.IsDefined() && n.Mark().line >= 0)
            os << ":" << n.Mark().line + 1 << ":" << n.Mark().column + 1;
        os << ": " << msg;
        throw ProgramError(os.str());
    }

    template <class T>
    T as(const YAML::Node& n, const char* what) const
    {
        if (!n.IsDefined() || n.IsNull())
            fail(n, std::string("missing ") + what);
        try {
            return n.as<T>();
        }
        catch (const YAML::BadConversion&) {
            fail(n, std::string("bad value for ") + what);
        }
    }

    template <class T>
    T get(const YAML::Node& map, const char* key, T fallback) const
    {
        auto n = map[key];
        if (!n.IsDefined() || n.IsNull())
            return fallback;
        return as<T>(n, key);
    }

    void only_keys(const YAML::Node& map, std::initializer_list<const char*> keys) const
    {
        if (!map.IsMap())
            fail(map, "expected a mapping");
        for (const auto& kv : map) {
            auto k = kv.first.as<std::string>();
            bool ok = false;
            for (const char* allowed : keys)
                ok = ok || k == allowed;
            if (!ok)
                fail(kv.first, "unknown key '" + k + "'");
        }
    }

    ProgramFile parse(const YAML::Node& root);

private:
    TonePick tone(const YAML::Node& n) const;
    std::vector<SplineWord> entry(const YAML::Node& n, int channel, Parameter p,
                                  std::optional<std::uint64_t> gate_duration) const;
    std::uint64_t constant_lsb(const YAML::Node& n, ParamKind kind) const;
    double physical(const YAML::Node& n, ParamKind kind) const;
    GateDefinition gate(const YAML::Node& n, const std::vector<int>& channels) const;

    std::string source_;
};

double lsb_scale(ParamKind kind)
{
    switch (kind) {
    case ParamKind::Freq:
        return 1.0 / kFepsHz;
    case ParamKind::Phase:
    case ParamKind::Frame:
        return double(kWordModulus);
    case ParamKind::Amp:
        return double(AmpWord::kFullScale) * double(1 << 24);
    }
    return 1.0;
}

// Reads a physical value: Hz for frequencies, turns (or degrees) for phases,
// fraction of full scale for amplitudes.
double Parser::physical(const YAML::Node& n, ParamKind kind) const
{
    if (n.IsScalar())
        return as<double>(n, "value");
    if (n["degrees"].IsDefined()) {
        if (kind != ParamKind::Phase && kind != ParamKind::Frame)
            fail(n["degrees"], "degrees only apply to phase and frame parameters");
        return as<double>(n["degrees"], "degrees") / 360.0;
    }
    for (const char* key : {"value", "hz", "turns", "fraction"})
        if (n[key].IsDefined())
            return as<double>(n[key], key);
    fail(n, "expected one of value, hz, turns, degrees, fraction, word");
}

std::uint64_t Parser::constant_lsb(const YAML::Node& n, ParamKind kind) const
{
    if (n.IsMap() && n["word"].IsDefined()) {
        auto w = as<std::uint64_t>(n["word"], "word");
        if (w > kWordMask)
            fail(n["word"], "word does not fit 40 bits");
        return w;
    }
    double v = physical(n, kind);
    try {
        switch (kind) {
        case ParamKind::Freq:
            return freq_to_word(v).value;
        case ParamKind::Phase:
        case ParamKind::Frame:
            return phase_from_turns(v).value;
        case ParamKind::Amp:
            if (!(v >= -1 && v <= 1))
                fail(n, "amplitude must be a fraction of full scale in [-1, 1]");
            return amp_from_fraction(v).padded();
        }
    }
    catch (const ProgramError&) {
        throw;
    }
    catch (const Error& e) {
        fail(n, e.what());
    }
    return 0;
}

TonePick Parser::tone(const YAML::Node& n) const
{
    only_keys(n, {"channel", "tone"});
    TonePick t{as<int>(n["channel"], "channel"), as<int>(n["tone"], "tone")};
    if (t.channel < 0 || t.channel >= kChannels || t.tone < 0 || t.tone >= kTonesPerChannel)
        fail(n, "tone reference out of range");
    return t;
}

std::vector<SplineWord> Parser::entry(const YAML::Node& n, int channel, Parameter p,
                                      std::optional<std::uint64_t> gate_duration) const
{
    const ParamKind kind = kind_of(p);
    std::vector<SplineWord> words;
    auto base = [&](std::uint64_t duration) {
        SplineWord w;
        w.duration = duration;
        w.meta.channel = std::uint8_t(channel);
        w.meta.parameter = p;
        return w;
    };
    auto need_duration = [&](const YAML::Node& at) {
        auto d = at.IsMap() ? get<std::uint64_t>(at, "duration", gate_duration.value_or(0))
                            : gate_duration.value_or(0);
        if (d == 0)
            fail(at, "a duration (in cycles) is needed, either here or on the gate");
        return d;
    };
    auto knot = [&](const YAML::Node& k) {
        only_keys(k, {"duration", "coeffs", "value", "hz", "turns", "degrees", "fraction", "word", "hold"});
        SplineWord w = base(need_duration(k));
        if (get<bool>(k, "hold", false)) {
            w.meta.hold = true;
            return w;
        }
        if (!k["coeffs"].IsDefined()) {
            w.coeffs[0] = constant_lsb(k, kind);
            return w;
        }
        auto cs = k["coeffs"];
        if (!cs.IsSequence() || cs.size() == 0 || cs.size() > 4)
            fail(cs, "coeffs must list 1 to 4 polynomial coefficients");
        std::array<double, 4> c{};
        for (std::size_t i = 0; i < cs.size(); i++)
            c[i] = as<double>(cs[i], "coefficient") * lsb_scale(kind);
        if (kind == ParamKind::Freq) {
            for (double tau : {0.0, 1.0}) {
                double hz = (c[0] + c[1] * tau + c[2] * tau * tau + c[3] * tau * tau * tau) * kFepsHz;
                if (!(hz >= 0 && hz < double(kSampleRateHz) / 2))
                    fail(cs, "frequency spline leaves the band [0, 409.6 MHz)");
            }
        }
        try {
            auto kc = poly_to_knot(c, w.duration);
            w.coeffs = kc.coeffs;
            w.meta.shift = kc.shift;
        }
        catch (const Error& e) {
            fail(cs, e.what());
        }
        return w;
    };

    if (n.IsScalar()) {
        SplineWord w = base(need_duration(n));
        w.coeffs[0] = constant_lsb(n, kind);
        words.push_back(w);
    }
    else {
        only_keys(n, {"value", "hz", "turns", "degrees", "fraction", "word", "knots", "hold", "duration", "sync",
                      "feedforward", "apply", "invert"});
        if (n["knots"].IsDefined()) {
            if (!n["knots"].IsSequence() || n["knots"].size() == 0)
                fail(n["knots"], "knots must be a non-empty list");
            for (const auto& k : n["knots"])
                words.push_back(knot(k));
        }
        else if (get<bool>(n, "hold", false)) {
            SplineWord w = base(need_duration(n));
            w.meta.hold = true;
            words.push_back(w);
        }
        else {
            SplineWord w = base(need_duration(n));
            w.coeffs[0] = constant_lsb(n, kind);
            words.push_back(w);
        }
        if (get<bool>(n, "sync", false))
            words.front().meta.sync = true;
        if (n["feedforward"].IsDefined()) {
            if (kind != ParamKind::Freq)
                fail(n["feedforward"], "feedforward is a flag of frequency parameters");
            for (auto& w : words)
                w.meta.feedforward_enable = get<bool>(n, "feedforward", false);
        }
        if ((n["apply"].IsDefined() || n["invert"].IsDefined()) && kind != ParamKind::Frame)
            fail(n, "apply/invert are flags of frame parameters");
    }
    if (kind == ParamKind::Frame)
        for (auto& w : words) {
            w.meta.frame_mask.apply = n.IsMap() ? get<bool>(n, "apply", true) : true;
            w.meta.frame_mask.invert = n.IsMap() ? get<bool>(n, "invert", false) : false;
        }
    if (gate_duration) {
        std::uint64_t total = 0;
        for (const auto& w : words)
            total += w.duration;
        if (total != *gate_duration) {
            std::ostringstream os;
            os << parameter_name(p) << " on channel " << channel << " lasts " << total
               << " cycles but the gate lasts " << *gate_duration;
            fail(n, os.str());
        }
    }
    return words;
}

GateDefinition Parser::gate(const YAML::Node& n, const std::vector<int>& channels) const
{
    only_keys(n, {"name", "duration", "wait_trigger", "streamed", "channels"});
    GateDefinition g;
    g.name = as<std::string>(n["name"], "gate name");
    g.wait_for_trigger = get<bool>(n, "wait_trigger", false);
    std::optional<std::uint64_t> duration;
    if (n["duration"].IsDefined()) {
        duration = as<std::uint64_t>(n["duration"], "duration");
        if (*duration == 0)
            fail(n["duration"], "gate duration must be at least one cycle");
    }
    auto chans = n["channels"];
    if (!chans.IsDefined() || !chans.IsMap())
        fail(n, "gate '" + g.name + "' needs a 'channels' mapping");
    for (const auto& ckv : chans) {
        int c = as<int>(ckv.first, "channel");
        if (std::find(channels.begin(), channels.end(), c) == channels.end())
            fail(ckv.first, "channel " + std::to_string(c) + " is not declared in 'channels'");
        if (!ckv.second.IsMap())
            fail(ckv.second, "expected a mapping of parameter names");
        for (const auto& pkv : ckv.second) {
            auto pname = as<std::string>(pkv.first, "parameter");
            auto p = parameter_from_name(pname);
            if (!p)
                fail(pkv.first, "unknown parameter '" + pname + "' (freq0, phase0, amp0, frame0, freq1, ...)");
            auto ws = entry(pkv.second, c, *p, duration);
            g.words.insert(g.words.end(), ws.begin(), ws.end());
        }
    }
    if (g.words.empty())
        fail(n, "gate '" + g.name + "' defines no parameters");
    if (auto s = n["streamed"]; s.IsDefined()) {
        if (!s.IsSequence())
            fail(s, "streamed must be a list of {channel, parameter}");
        for (const auto& item : s) {
            only_keys(item, {"channel", "parameter"});
            auto pname = as<std::string>(item["parameter"], "parameter");
            auto p = parameter_from_name(pname);
            if (!p)
                fail(item["parameter"], "unknown parameter '" + pname + "'");
            g.streamed.emplace_back(as<int>(item["channel"], "channel"), *p);
        }
    }
    return g;
}

ProgramFile Parser::parse(const YAML::Node& root)
{
    only_keys(root, {"name", "clock", "channels", "gates", "sequence", "lut_strategy", "raman", "ms_triplets",
                     "feedforward", "xtalk", "expect"});
    ProgramFile pf;
    pf.name = get<std::string>(root, "name", "");

    if (auto clk = root["clock"]; clk.IsDefined()) {
        only_keys(clk, {"sample_rate_hz", "sequencer_hz"});
        if (get<double>(clk, "sample_rate_hz", double(kSampleRateHz)) != double(kSampleRateHz))
            fail(clk["sample_rate_hz"], "only the 819.2 MHz DDS sample rate is supported");
        if (get<double>(clk, "sequencer_hz", double(kSequencerClockHz)) != double(kSequencerClockHz))
            fail(clk["sequencer_hz"], "only the 409.6 MHz sequencer clock is supported");
    }

    auto ch = root["channels"];
    if (!ch.IsDefined() || !ch.IsSequence() || ch.size() == 0)
        fail(root, "'channels' must list at least one channel");
    for (const auto& c : ch) {
        int v = as<int>(c, "channel");
        if (v < 0 || v >= kChannels)
            fail(c, "channel must be in [0, 8)");
        pf.program.channels.push_back(v);
    }

    std::map<std::string, std::size_t> index;
    if (auto gs = root["gates"]; gs.IsDefined()) {
        if (!gs.IsSequence())
            fail(gs, "'gates' must be a list");
        for (const auto& g : gs) {
            auto def = gate(g, pf.program.channels);
            if (!index.emplace(def.name, pf.program.gates.size()).second)
                fail(g["name"], "gate '" + def.name + "' defined twice");
            pf.program.gates.push_back(std::move(def));
        }
    }

    if (auto seq = root["sequence"]; seq.IsDefined() && !seq.IsNull()) {
        if (!seq.IsSequence())
            fail(seq, "'sequence' must be a list of gate names");
        for (const auto& item : seq) {
            std::string name;
            std::uint64_t repeat = 1;
            if (item.IsScalar()) {
                name = item.as<std::string>();
            }
            else {
                only_keys(item, {"gate", "repeat"});
                name = as<std::string>(item["gate"], "gate");
                repeat = get<std::uint64_t>(item, "repeat", 1);
            }
            auto it = index.find(name);
            if (it == index.end())
                fail(item, "sequence uses undefined gate '" + name + "'");
            pf.program.sequence.insert(pf.program.sequence.end(), repeat, it->second);
        }
    }

    auto strategy = get<std::string>(root, "lut_strategy", "fail");
    if (strategy == "fail")
        pf.lut_strategy = LutStrategy::Fail;
    else if (strategy == "reprogram")
        pf.lut_strategy = LutStrategy::Reprogram;
    else
        fail(root["lut_strategy"], "lut_strategy must be 'fail' or 'reprogram'");

    if (auto rs = root["raman"]; rs.IsDefined()) {
        for (const auto& r : rs) {
            only_keys(r, {"kind", "upper", "lower", "global", "red", "blue", "resonance_hz", "rabi_hz", "sign"});
            RamanDecl d;
            auto kind = as<std::string>(r["kind"], "kind");
            if (kind == "single") {
                d.role = RamanRole::SingleQubit;
                d.tones = {tone(r["upper"]), tone(r["lower"])};
            }
            else if (kind == "ms_upper" || kind == "ms_lower") {
                d.role = kind == "ms_upper" ? RamanRole::MsSidebandsUpper : RamanRole::MsSidebandsLower;
                d.tones = {tone(r["global"]), tone(r["red"]), tone(r["blue"])};
            }
            else {
                fail(r["kind"], "raman kind must be single, ms_upper or ms_lower");
            }
            d.resonance_hz = get<double>(r, "resonance_hz", 0.0);
            d.rabi_hz = get<double>(r, "rabi_hz", 0.0);
            d.sign = get<int>(r, "sign", -1);
            if (d.sign != 1 && d.sign != -1)
                fail(r["sign"], "sign must be +1 or -1");
            pf.raman.push_back(d);
        }
    }

    if (auto ms = root["ms_triplets"]; ms.IsDefined()) {
        for (const auto& m : ms) {
            only_keys(m, {"carrier_hz", "red", "blue"});
            pf.ms_triplets.push_back({as<double>(m["carrier_hz"], "carrier_hz"), tone(m["red"]), tone(m["blue"])});
        }
    }

    if (auto ff = root["feedforward"]; ff.IsDefined()) {
        only_keys(ff, {"target_harmonic", "monitor_harmonic", "monitor_drift_hz", "sign"});
        FeedforwardDecl d;
        d.config.target_harmonic = get<std::int64_t>(ff, "target_harmonic", 105);
        d.config.monitor_harmonic = get<std::int64_t>(ff, "monitor_harmonic", 32);
        if (d.config.monitor_harmonic <= 0 || d.config.target_harmonic <= 0)
            fail(ff, "harmonic numbers must be positive");
        d.monitor_drift_hz = get<double>(ff, "monitor_drift_hz", 0.0);
        d.sign = get<int>(ff, "sign", -1);
        if (d.sign != 1 && d.sign != -1)
            fail(ff["sign"], "sign must be +1 or -1");
        pf.feedforward = d;
    }

    if (auto xt = root["xtalk"]; xt.IsDefined()) {
        only_keys(xt, {"taps"});
        XtalkConfig cfg;
        for (const auto& t : xt["taps"]) {
            only_keys(t, {"from", "to", "amplitude", "phase_deg", "delay"});
            XtalkTap tap;
            tap.from = as<int>(t["from"], "from");
            tap.to = as<int>(t["to"], "to");
            tap.amplitude = as<double>(t["amplitude"], "amplitude");
            tap.phase_rad = get<double>(t, "phase_deg", 0.0) * std::numbers::pi / 180.0;
            tap.delay = get<unsigned>(t, "delay", kDspLatencyCycles);
            cfg.taps.push_back(tap);
        }
        try {
            validate(cfg);
        }
        catch (const Error& e) {
            fail(xt, e.what());
        }
        pf.xtalk = cfg;
    }

    if (auto ex = root["expect"]; ex.IsDefined()) {
        only_keys(ex, {"p1", "p1_tolerance", "p1_pair", "plut_entries", "plut_channel"});
        if (ex["p1"].IsDefined())
            pf.expect.p1 = as<double>(ex["p1"], "p1");
        pf.expect.p1_tolerance = get<double>(ex, "p1_tolerance", 1e-6);
        pf.expect.p1_pair = get<std::size_t>(ex, "p1_pair", 0);
        if (ex["plut_entries"].IsDefined())
            pf.expect.plut_entries = as<std::size_t>(ex["plut_entries"], "plut_entries");
        pf.expect.plut_channel = get<int>(ex, "plut_channel", pf.program.channels.front());
    }
    return pf;
}

}  // namespace

ProgramFile parse_program(const std::string& text, const std::string& source)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << source << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
        throw ProgramError(os.str());
    }
    Parser p(source);
    if (!root.IsMap())
        throw ProgramError(source + ": a program is a YAML mapping");
    return p.parse(root);
}

ProgramFile load_program(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str(), path);
}

RamanPairSpec pair_spec(const RamanDecl& r)
{
    if (r.role != RamanRole::SingleQubit)
        throw ValidationError("only single-qubit Raman pairs drive the qubit oracle");
    RamanPairSpec s;
    s.upper_channel = r.tones[0].channel;
    s.upper_tone = r.tones[0].tone;
    s.lower_channel = r.tones[1].channel;
    s.lower_tone = r.tones[1].tone;
    s.calibration.rabi_full_scale = 2 * std::numbers::pi * r.rabi_hz;
    s.calibration.resonance_counts = correction_counts(r.resonance_hz);
    return s;
}

}  // namespace rfseq::tools
