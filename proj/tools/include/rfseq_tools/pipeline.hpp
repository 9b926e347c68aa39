#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfseq/crosstalk.hpp"
#include "rfseq/playback.hpp"
#include "rfseq/sequencer.hpp"
#include "rfseq_tools/program_file.hpp"

namespace rfseq::tools {

struct SimOptions {
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> pin_counter;
    /// 0 runs until the program has played out (capped at kDefaultCycleCap).
    std::uint64_t max_cycles = 0;
};

inline constexpr std::uint64_t kDefaultCycleCap = 50'000'000;

std::uint64_t power_up_counter(const SimOptions& o);
MachineConfig machine_config(const ProgramFile& pf, std::uint64_t power_up_counter);

CompiledProgram compile(const ProgramFile& pf);
nlohmann::json compile_report_json(const ProgramFile& pf, const CompiledProgram& c);
nlohmann::json timing_report_json(const CompiledProgram& c);

struct SimulationResult {
    Trace trace;
    bool finished = false;
    std::vector<std::string> warnings;
    /// Per active channel (parallel to trace.channels), one I/Q sample per
    /// cycle after crosstalk compensation; empty without an xtalk block.
    std::vector<std::vector<IqSample>> compensated;
};

/// Compiles nothing; runs `c` through the machine. Throws SimulationFault.
SimulationResult simulate_program(const ProgramFile& pf, const CompiledProgram& c, const SimOptions& o);

/// Complex envelope of a channel at the first sample of every cycle, both tones summed.
std::vector<IqSample> channel_envelope(const Trace& t, int channel);

/// Frequency reuse without synchronization, from the compiled gate sequence.
std::vector<std::string> sync_lint(const CompiledProgram& c);
/// Feed-forward routing against the declared Raman groups.
std::vector<std::string> feedforward_lint(const ProgramFile& pf, const CompiledProgram& c);
/// 2*carrier == red + blue on every cycle where both sidebands play.
std::vector<std::string> ms_triplet_lint(const ProgramFile& pf, const Trace& t);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<Check> checks;

    bool passed() const;
    nlohmann::json to_json() const;
};

VerifyReport verify_program(const ProgramFile& pf, const SimOptions& o);

/// 32-byte little-endian records, back to back.
void write_records(std::ostream& os, const std::vector<Word256>& records);
std::vector<Word256> read_records(std::istream& is);

void write_trace_text(std::ostream& os, const SimulationResult& r);
/// Header: "RFSQTRC\0", u32 version, u32 row bytes, u64 power-up counter,
/// u64 row count; then fixed-size little-endian rows (docs/dump_format.md).
void write_trace_binary(std::ostream& os, const SimulationResult& r);

}  // namespace rfseq::tools
