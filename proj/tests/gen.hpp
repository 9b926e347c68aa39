#pragma once

// Random gate programs for the property tests.

#include <algorithm>
#include <random>

#include "rfseq/sequencer.hpp"

namespace gen {

struct Limits {
    int max_channels = 3;
    int max_gates = 10;
    int max_knots = 3;
    int max_sequence = 120;
    std::uint64_t min_duration = 4;
    std::uint64_t max_duration = 60;
    bool streamed = true;
};

inline std::vector<std::uint64_t> split(std::mt19937_64& rng, std::uint64_t total, int parts)
{
    std::vector<std::uint64_t> cuts;
    for (int i = 1; i < parts && total > 1; i++)
        cuts.push_back(1 + rng() % (total - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<std::uint64_t> out;
    std::uint64_t prev = 0;
    for (auto c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    out.push_back(total - prev);
    return out;
}

inline rfseq::SplineWord random_knot(std::mt19937_64& rng, int ch, rfseq::Parameter p, std::uint64_t duration)
{
    rfseq::SplineWord w;
    // A small alphabet of values so that gates share PLUT entries.
    w.coeffs[0] = (rng() % 6) * 1000003;
    if (rng() % 3 == 0)
        w.coeffs[1] = rng() % 50;
    if (rng() % 5 == 0)
        w.coeffs[3] = rng() % 3;
    w.duration = duration;
    w.meta.channel = std::uint8_t(ch);
    w.meta.parameter = p;
    w.meta.sync = rng() % 4 == 0;
    w.meta.hold = rng() % 7 == 0;
    w.meta.shift = std::uint8_t(rng() % 3);
    if (rfseq::kind_of(p) == rfseq::ParamKind::Freq)
        w.meta.feedforward_enable = rng() % 5 == 0;
    if (rfseq::kind_of(p) == rfseq::ParamKind::Frame)
        w.meta.frame_mask = {bool(rng() & 1), bool(rng() & 1)};
    return w;
}

inline rfseq::GateProgram program(std::mt19937_64& rng, const Limits& lim = {})
{
    rfseq::GateProgram p;
    std::vector<int> all = {0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(all.begin(), all.end(), rng);
    int nch = 1 + int(rng() % lim.max_channels);
    p.channels.assign(all.begin(), all.begin() + nch);
    std::sort(p.channels.begin(), p.channels.end());

    int ngates = 1 + int(rng() % lim.max_gates);
    for (int g = 0; g < ngates; g++) {
        rfseq::GateDefinition gate;
        gate.name = "g" + std::to_string(g);
        gate.wait_for_trigger = rng() % 4 == 0;
        std::uint64_t total = lim.min_duration + rng() % (lim.max_duration - lim.min_duration + 1);
        for (int ch : p.channels) {
            for (int pi = 0; pi < rfseq::kParameters; pi++) {
                if (rng() % 4 == 0)
                    continue;  // left to padding
                auto param = rfseq::Parameter(pi);
                for (auto d : split(rng, total, 1 + int(rng() % lim.max_knots)))
                    gate.words.push_back(random_knot(rng, ch, param, d));
                if (lim.streamed && rng() % 10 == 0)
                    gate.streamed.push_back({ch, param});
            }
        }
        if (gate.words.empty())
            gate.words.push_back(random_knot(rng, p.channels[0], rfseq::Parameter::Amp0, total));
        p.gates.push_back(std::move(gate));
    }
    int nseq = int(rng() % (lim.max_sequence + 1));
    for (int i = 0; i < nseq; i++)
        p.sequence.push_back(rng() % p.gates.size());
    return p;
}

}  // namespace gen
