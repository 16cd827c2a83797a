#pragma once

#include "qkdsim/analysis.hpp"

#include <stdexcept>
#include <string>

namespace qkdsim {

enum class Protocol { Bb84, ThreeStage };
enum class Attack { None, InterceptResend, FakedState, Siphon, Mitm };

std::string protocol_name(Protocol p);
std::string attack_name(Attack a);

/// Invalid flags, file keys, or flag combinations. Exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A run's own self-checks failed. Exit code 3.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Trace or report could not be written. Exit code 4.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --help / --version were requested; `text` is what to print.
struct HelpRequested {
    std::string text;
};

struct ScenarioConfig {
    Protocol protocol = Protocol::Bb84;
    Attack attack = Attack::None;
    long pulses = 1000;
    std::uint64_t seed = 1;
    int grid_size = 1024;
    int dead_slots = 1;
    bool authenticated = false;
    int siphon_photons = 0;
    int repeat = 1;
    std::string trace_path;
    std::string report_path;
};

/// Parse `qkd-sim run ...` arguments, merge in an optional JSON config file
/// (flags out-rank file values; unknown file keys are rejected), resolve the
/// seed default from QKD_SIM_SEED, and validate. Throws ConfigError on any
/// problem; throws HelpRequested for --help/--version.
ScenarioConfig parse_config(int argc, const char* const* argv);

/// Bounds and protocol/attack compatibility. Throws ConfigError naming the
/// offending field.
void validate_config(const ScenarioConfig& config);

struct ScenarioResult {
    Transcript transcript;
    RunReport report;
};

/// Execute one trial. Deterministic: the trace and report are a pure
/// function of (config, trial). Runs the report self-checks and throws
/// InvariantError if any fail.
ScenarioResult run_scenario(const ScenarioConfig& config, int trial = 0);

/// One line per pulse:
/// index=.. protocol=.. alice_bit=.. alice_basis=.. eve_action=..
/// bob_basis=.. detection=.. sifted=..
/// Bases render as Z/X, detections as 0/1/none.
std::string render_trace(const Transcript& transcript);

/// Report as a JSON document with config echo, results, and check flags.
std::string render_report(const RunReport& report, const ScenarioEcho& echo);

void write_trace(const Transcript& transcript, const std::string& path);
void write_report(const RunReport& report, const ScenarioEcho& echo, const std::string& path);

/// Per-trial output path: unchanged for a single trial, suffixed ".trialK"
/// when repeating.
std::string trial_path(const std::string& base, int trial, int repeat);

} // namespace qkdsim
