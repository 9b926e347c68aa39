#pragma once

// Gate-program documents (YAML). The schema is described in
// docs/program_format.md; parse errors carry line and column.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfseq/crosstalk.hpp"
#include "rfseq/error.hpp"
#include "rfseq/feedforward.hpp"
#include "rfseq/qubit.hpp"
#include "rfseq/sequencer.hpp"

namespace rfseq::tools {

/// Schema or semantic error in a program document.
class ProgramError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// The file could not be read.
class IoError : public Error {
public:
    using Error::Error;
};

struct TonePick {
    int channel = 0;
    int tone = 0;
};

struct RamanDecl {
    RamanRole role = RamanRole::SingleQubit;
    /// single: upper, lower. ms_*: global, red, blue.
    std::vector<TonePick> tones;
    double resonance_hz = 0;
    double rabi_hz = 0;  // Rabi frequency at full scale on both legs
    int sign = -1;
};

struct MsTripletCheck {
    double carrier_hz = 0;
    TonePick red;
    TonePick blue;
};

struct Expectations {
    std::optional<double> p1;
    double p1_tolerance = 1e-6;
    std::size_t p1_pair = 0;
    std::optional<std::size_t> plut_entries;
    int plut_channel = 0;
};

struct FeedforwardDecl {
    FeedforwardConfig config;
    /// Drift seen at the monitor harmonic.
    double monitor_drift_hz = 0;
    int sign = -1;
};

struct ProgramFile {
    std::string name;
    GateProgram program;
    LutStrategy lut_strategy = LutStrategy::Fail;
    std::vector<RamanDecl> raman;
    std::vector<MsTripletCheck> ms_triplets;
    std::optional<FeedforwardDecl> feedforward;
    std::optional<XtalkConfig> xtalk;
    Expectations expect;
};

ProgramFile parse_program(const std::string& text, const std::string& source = "<string>");
/// Throws IoError if `path` cannot be read.
ProgramFile load_program(const std::string& path);

/// Pair spec for the oracle from a single-qubit Raman declaration.
RamanPairSpec pair_spec(const RamanDecl& r);

}  // namespace rfseq::tools
