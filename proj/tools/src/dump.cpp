#include <ostream>

#include "rfseq_tools/pipeline.hpp"

namespace rfseq::tools {

namespace {

constexpr std::uint32_t kDumpVersion = 1;
constexpr std::uint32_t kRowBytes = 48;
constexpr std::uint32_t kXtalkRowBytes = 56;

template <class T>
void put(std::ostream& os, T v)
{
    using U = std::make_unsigned_t<T>;
    auto u = U(v);
    for (std::size_t i = 0; i < sizeof(T); i++)
        os.put(char((u >> (8 * i)) & 0xff));
}

std::size_t channel_index(const Trace& t, int channel)
{
    for (std::size_t i = 0; i < t.channels.size(); i++)
        if (t.channels[i] == channel)
            return i;
    return 0;
}

std::uint16_t fifo_total(const ChannelCycle& row)
{
    unsigned n = 0;
    for (auto f : row.fifo)
        n += f;
    return std::uint16_t(n);
}

}  // namespace

void write_trace_text(std::ostream& os, const SimulationResult& r)
{
    const auto& t = r.trace;
    const bool xt = !r.compensated.empty();
    os << "# rfseq trace v" << kDumpVersion << "\n";
    os << "# power_up_counter " << t.power_up_counter << "\n";
    os << "# cycles " << t.cycles << "\n";
    os << "# triggers";
    for (auto c : t.triggers)
        os << " " << c;
    os << "\n";
    os << "cycle counter channel tone freq_word phase_word amp sample0 sample1 fifo_total";
    if (xt)
        os << " comp_i comp_q";
    os << "\n";
    const std::size_t per = t.channels.size();
    for (std::size_t i = 0; i < t.rows.size(); i++) {
        const auto& row = t.rows[i];
        for (int k = 0; k < kTonesPerChannel; k++) {
            const auto& tone = row.tones[k];
            os << row.cycle << ' ' << row.counter << ' ' << int(row.channel) << ' ' << k << ' ' << tone.freq.value
               << ' ' << tone.phase.value << ' ' << tone.amp.value << ' ' << tone.samples[0].value << ' '
               << tone.samples[1].value << ' ' << fifo_total(row);
            if (xt) {
                const auto& s = r.compensated[channel_index(t, row.channel)][i / per];
                os << ' ' << s.i << ' ' << s.q;
            }
            os << '\n';
        }
    }
}

void write_trace_binary(std::ostream& os, const SimulationResult& r)
{
    const auto& t = r.trace;
    const bool xt = !r.compensated.empty();
    os.write("RFSQTRC", 8);
    put<std::uint32_t>(os, kDumpVersion);
    put<std::uint32_t>(os, xt ? kXtalkRowBytes : kRowBytes);
    put<std::uint64_t>(os, t.power_up_counter);
    put<std::uint64_t>(os, t.rows.size() * kTonesPerChannel);
    const std::size_t per = t.channels.size();
    for (std::size_t i = 0; i < t.rows.size(); i++) {
        const auto& row = t.rows[i];
        for (int k = 0; k < kTonesPerChannel; k++) {
            const auto& tone = row.tones[k];
            put<std::uint64_t>(os, row.cycle);
            put<std::uint64_t>(os, row.counter);
            put<std::uint64_t>(os, tone.freq.value);
            put<std::uint64_t>(os, tone.phase.value);
            put<std::int32_t>(os, tone.samples[0].value);
            put<std::int32_t>(os, tone.samples[1].value);
            put<std::int16_t>(os, tone.amp.value);
            put<std::uint16_t>(os, fifo_total(row));
            put<std::uint8_t>(os, row.channel);
            put<std::uint8_t>(os, std::uint8_t(k));
            put<std::uint16_t>(os, 0);
            if (xt) {
                const auto& s = r.compensated[channel_index(t, row.channel)][i / per];
                put<std::int32_t>(os, s.i);
                put<std::int32_t>(os, s.q);
            }
        }
    }
}

}  // namespace rfseq::tools
