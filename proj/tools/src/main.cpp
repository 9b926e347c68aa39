// rfseq: compile, simulate, verify and report on gate programs.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rfseq/error.hpp"
#include "rfseq_tools/pipeline.hpp"

namespace {

using namespace rfseq;
using namespace rfseq::tools;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

struct Options {
    std::string program;
    std::string out;
    std::uint64_t seed = 1;
    std::uint64_t cycles = 0;
    std::string dump_format = "text";
    std::optional<std::uint64_t> pin_counter;

    SimOptions sim() const { return {seed, pin_counter, cycles}; }
};

void add_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--program", o.program, "Gate program (YAML)")->required();
    cmd->add_option("--out", o.out, "Output path");
    cmd->add_option("--seed", o.seed, "Seed for the power-up global counter");
    cmd->add_option("--cycles", o.cycles, "Cycles to simulate (0: until the program has played)");
    cmd->add_option("--dump-format", o.dump_format, "Waveform dump format")
        ->check(CLI::IsMember({"text", "binary"}));
    cmd->add_option("--pin-counter", o.pin_counter, "Pin the power-up global counter to this value");
}

std::ofstream open_out(const std::string& path, bool binary)
{
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f)
        throw IoError("cannot write " + path);
    return f;
}

void emit_json(const nlohmann::json& j, const std::string& out)
{
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) {
        auto f = open_out(out, false);
        f << j.dump(2) << "\n";
    }
}

int cmd_compile(const Options& o)
{
    auto pf = load_program(o.program);
    auto c = compile(pf);
    auto report = compile_report_json(pf, c);
    std::cout << report.dump(2) << "\n";
    if (!o.out.empty()) {
        auto f = open_out(o.out, true);
        write_records(f, c.records);
        auto r = open_out(o.out + ".json", false);
        r << report.dump(2) << "\n";
        if (!f || !r)
            throw IoError("writing " + o.out + " failed");
    }
    return kExitOk;
}

int cmd_simulate(const Options& o)
{
    auto pf = load_program(o.program);
    auto c = compile(pf);
    auto r = simulate_program(pf, c, o.sim());
    for (const auto& w : r.warnings)
        std::cerr << "warning: " << w << "\n";
    nlohmann::json summary = {
        {"program", pf.name},
        {"cycles", r.trace.cycles},
        {"finished", r.finished},
        {"power_up_counter", r.trace.power_up_counter},
        {"triggers", r.trace.triggers},
        {"warnings", r.warnings},
    };
    std::cout << summary.dump(2) << "\n";
    if (!o.out.empty()) {
        const bool bin = o.dump_format == "binary";
        auto f = open_out(o.out, bin);
        if (bin)
            write_trace_binary(f, r);
        else
            write_trace_text(f, r);
        if (!f)
            throw IoError("writing " + o.out + " failed");
    }
    return kExitOk;
}

int cmd_verify(const Options& o)
{
    auto pf = load_program(o.program);
    auto rep = verify_program(pf, o.sim());
    emit_json(rep.to_json(), o.out);
    return rep.passed() ? kExitOk : kExitInvalid;
}

int cmd_report(const Options& o)
{
    auto pf = load_program(o.program);
    auto c = compile(pf);
    nlohmann::json j = {{"compile", compile_report_json(pf, c)}, {"timing", timing_report_json(c)}};
    emit_json(j, o.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rfseq: gate-program compiler and cycle-accurate DDS sequencer simulator"};
    app.require_subcommand(1);
    Options opts;
    int (*run)(const Options&) = nullptr;
    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const Options&);
    };
    for (const auto& s : {Sub{"compile", "Compile a program into a 256-bit record stream", cmd_compile},
                          Sub{"simulate", "Run the cycle-accurate simulation and dump the waveform", cmd_simulate},
                          Sub{"verify", "Run lints and the qubit oracle checks", cmd_verify},
                          Sub{"report", "Print compression and streaming-time reports", cmd_report}}) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_options(cmd, opts);
        cmd->callback([&run, fn = s.fn] { run = fn; });
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        return run(opts);
    }
    catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    catch (const SimulationFault& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
