#include "qkdsim/scenario.hpp"

#include "qkdsim/adversary.hpp"
#include "qkdsim/protocol.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qkdsim {

std::string protocol_name(Protocol p) {
    return p == Protocol::Bb84 ? "bb84" : "three-stage";
}

std::string attack_name(Attack a) {
    switch (a) {
    case Attack::None:
        return "none";
    case Attack::InterceptResend:
        return "intercept-resend";
    case Attack::FakedState:
        return "faked-state";
    case Attack::Siphon:
        return "siphon";
    case Attack::Mitm:
        return "mitm";
    }
    return "none";
}

namespace {

constexpr Basis kAgreedBasis = kBasisZ; // three-stage measurement basis, protocol-wide

// Party stream ids within a trial.
constexpr std::uint64_t kAliceStream = 0;
constexpr std::uint64_t kBobStream = 1;
constexpr std::uint64_t kEveStream = 2;

std::string detection_text(const Detection& d) {
    if (!d.is_click()) {
        return "none";
    }
    return d.bit() == 1 ? "1" : "0";
}

std::string note_suffix(const EveNote& note) {
    std::string s;
    if (note.eve_basis.has_value()) {
        s += note.eve_basis->symbol();
    }
    if (note.measured_bit.has_value()) {
        s += static_cast<char>('0' + *note.measured_bit);
    }
    return s;
}

ScenarioEcho make_echo(const ScenarioConfig& cfg, int trial) {
    ScenarioEcho e;
    e.protocol = protocol_name(cfg.protocol);
    e.attack = attack_name(cfg.attack);
    e.pulses = cfg.pulses;
    e.seed = cfg.seed;
    e.grid_size = cfg.grid_size;
    e.dead_slots = cfg.dead_slots;
    e.authenticated = cfg.authenticated;
    e.siphon_photons = cfg.siphon_photons;
    e.repeat = cfg.repeat;
    e.trial = trial;
    return e;
}

Transcript run_bb84(const ScenarioConfig& cfg, int trial) {
    const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(trial);
    RandomStream alice(trial_seed, kAliceStream);
    RandomStream bob(trial_seed, kBobStream);
    RandomStream eve(trial_seed, kEveStream);
    DetectorBank bank(cfg.dead_slots);

    Transcript t;
    t.config = make_echo(cfg, trial);
    t.records.reserve(static_cast<std::size_t>(cfg.pulses));

    std::vector<Bb84PulseRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.pulses));
    std::vector<std::string> actions;
    actions.reserve(static_cast<std::size_t>(cfg.pulses));

    for (long i = 0; i < cfg.pulses; ++i) {
        const int index = static_cast<int>(i);
        AlicePreparation prep = bb84_alice_prepare(alice);

        std::vector<Pulse> channel;
        std::string action = "none";
        switch (cfg.attack) {
        case Attack::None:
            channel.push_back(std::move(prep.pulse));
            break;
        case Attack::InterceptResend: {
            TapResult tap = intercept_resend(std::move(prep.pulse), eve);
            tap.note.index = index;
            action = "intercept-resend:" + note_suffix(tap.note);
            t.eve_notes.push_back(tap.note);
            channel = std::move(tap.pulses);
            break;
        }
        case Attack::FakedState: {
            TapResult tap = faked_state_bb84(std::move(prep.pulse), eve);
            tap.note.index = index;
            action = "faked-state:" + note_suffix(tap.note);
            t.eve_notes.push_back(tap.note);
            channel = std::move(tap.pulses);
            break;
        }
        default:
            channel.push_back(std::move(prep.pulse));
            break;
        }

        const BobMeasurement meas = bb84_bob_measure(bank, channel, bob);
        records.push_back(Bb84PulseRecord{index, prep.bit, prep.basis, meas.basis,
                                          meas.detection, false});
        actions.push_back(std::move(action));
    }

    auto [alice_key, bob_key] = bb84_sift(records);
    t.alice_key = std::move(alice_key);
    t.bob_key = std::move(bob_key);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const Bb84PulseRecord& rec = records[i];
        t.records.push_back(TraceRecord{rec.index, rec.alice_bit, rec.alice_basis.symbol(),
                                        actions[i], rec.bob_basis.symbol(), rec.bob_detection,
                                        rec.sifted});
    }
    return t;
}

Transcript run_three_stage(const ScenarioConfig& cfg, int trial) {
    const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(trial);
    RandomStream alice(trial_seed, kAliceStream);
    RandomStream bob(trial_seed, kBobStream);
    RandomStream eve(trial_seed, kEveStream);
    DetectorBank bank(cfg.dead_slots);

    Transcript t;
    t.config = make_echo(cfg, trial);
    t.siphon = cfg.attack == Attack::Siphon;

    for (long i = 0; i < cfg.pulses; ++i) {
        const int index = static_cast<int>(i);
        const int bit = draw_bit(alice);

        ThreeStageRecord rec;
        std::string action = "none";

        switch (cfg.attack) {
        case Attack::None: {
            rec = three_stage_run(index, bit, kAgreedBasis, cfg.grid_size, alice, bob,
                                  ThreeStageHooks{}, bank);
            break;
        }
        case Attack::FakedState: {
            ThreeStageFakedState forcer(kAgreedBasis, eve);
            const ThreeStageHooks hooks = forcer.hooks();
            rec = three_stage_run(index, bit, kAgreedBasis, cfg.grid_size, alice, bob, hooks,
                                  bank);
            EveNote note = forcer.note();
            note.index = index;
            action = "force:" + note_suffix(note);
            t.eve_notes.push_back(note);
            break;
        }
        case Attack::Siphon: {
            SiphonAttack attack(cfg.siphon_photons, cfg.grid_size, SiphonMode::Bernoulli, eve);
            const ThreeStageHooks hooks = attack.hooks();
            rec = three_stage_run(index, bit, kAgreedBasis, cfg.grid_size, alice, bob, hooks,
                                  bank);
            EveNote note;
            note.index = index;
            note.eve_basis = kAgreedBasis;
            note.measured_bit = attack.inferred_bit(kAgreedBasis);
            note.estimated_rotation = attack.estimated_sender_rotation();
            t.eve_notes.push_back(note);
            for (int s = 0; s < 3; ++s) {
                const auto& est = attack.estimates()[static_cast<std::size_t>(s)];
                if (est.has_value()) {
                    ++t.siphon_estimates_total;
                    if (est->angle == rec.stage_states[static_cast<std::size_t>(s)]) {
                        ++t.siphon_estimates_exact;
                    }
                }
            }
            action = note.measured_bit.has_value()
                         ? "siphon:" + std::string(1, static_cast<char>('0' + *note.measured_bit))
                         : "siphon:?";
            break;
        }
        default: {
            rec = three_stage_run(index, bit, kAgreedBasis, cfg.grid_size, alice, bob,
                                  ThreeStageHooks{}, bank);
            break;
        }
        }

        if (rec.bob_detection.is_click()) {
            t.alice_key.bits.push_back(bit);
            t.alice_key.source_indices.push_back(index);
            t.bob_key.bits.push_back(rec.bob_detection.bit());
            t.bob_key.source_indices.push_back(index);
        }
        t.records.push_back(TraceRecord{index, bit, kAgreedBasis.symbol(), action,
                                        kAgreedBasis.symbol(), rec.bob_detection,
                                        rec.bob_detection.is_click()});
    }
    return t;
}

Transcript run_mitm(const ScenarioConfig& cfg, int trial) {
    const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(trial);
    RandomStream alice(trial_seed, kAliceStream);
    RandomStream bob(trial_seed, kBobStream);
    RandomStream eve(trial_seed, kEveStream);

    Transcript t;
    t.config = make_echo(cfg, trial);
    t.mitm = true;

    std::vector<int> alice_bits;
    alice_bits.reserve(static_cast<std::size_t>(cfg.pulses));
    for (long i = 0; i < cfg.pulses; ++i) {
        alice_bits.push_back(draw_bit(alice));
    }

    MitmOutcome outcome = mitm_three_stage(alice_bits, kAgreedBasis, cfg.grid_size,
                                           cfg.dead_slots, cfg.authenticated, alice, bob, eve);
    t.mitm_detected = outcome.detected;
    if (outcome.detected) {
        return t; // handshake refused; no pulses exchanged, no key
    }

    t.alice_key = outcome.alice_key;
    t.bob_key = outcome.bob_key;
    t.eve_key_with_alice = outcome.eve_key_with_alice;
    t.eve_key_with_bob = outcome.eve_key_with_bob;

    for (std::size_t i = 0; i < outcome.alice_key.bits.size(); ++i) {
        const int index = outcome.alice_key.source_indices[i];
        EveNote note;
        note.index = index;
        note.measured_bit = outcome.eve_key_with_alice.bits[i];
        note.eve_basis = kAgreedBasis;
        t.eve_notes.push_back(note);

        const Detection det = Detection::click(outcome.bob_key.bits[i]);
        t.records.push_back(TraceRecord{index, outcome.alice_key.bits[i],
                                        kAgreedBasis.symbol(), "relay", kAgreedBasis.symbol(),
                                        det, true});
    }
    return t;
}

} // namespace

void validate_config(const ScenarioConfig& cfg) {
    if (cfg.pulses < 1) {
        throw ConfigError("pulses: must be >= 1");
    }
    if (cfg.grid_size < 2) {
        throw ConfigError("grid-size: must be >= 2");
    }
    if (cfg.dead_slots < 0) {
        throw ConfigError("dead-slots: must be >= 0");
    }
    if (cfg.siphon_photons < 0) {
        throw ConfigError("siphon-photons: must be >= 0");
    }
    if (cfg.repeat < 1) {
        throw ConfigError("repeat: must be >= 1");
    }

    const bool three_stage = cfg.protocol == Protocol::ThreeStage;
    switch (cfg.attack) {
    case Attack::None:
    case Attack::FakedState:
        break;
    case Attack::InterceptResend:
        if (three_stage) {
            throw ConfigError("attack: intercept-resend applies only to protocol bb84 "
                              "(use mitm against three-stage)");
        }
        break;
    case Attack::Siphon:
        if (!three_stage) {
            throw ConfigError("attack: siphon applies only to protocol three-stage");
        }
        if (cfg.siphon_photons < 1) {
            throw ConfigError("siphon-photons: must be >= 1 for attack siphon");
        }
        break;
    case Attack::Mitm:
        if (!three_stage) {
            throw ConfigError("attack: mitm applies only to protocol three-stage");
        }
        break;
    }
}

namespace {

void merge_config_file(const std::string& path, CLI::App& run, ScenarioConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot read file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config: top level must be an object");
    }

    const auto given = [&run](const std::string& flag) { return run.count(flag) > 0; };
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "protocol") {
                if (!given("--protocol")) {
                    const std::string v = value.get<std::string>();
                    if (v == "bb84") {
                        cfg.protocol = Protocol::Bb84;
                    } else if (v == "three-stage") {
                        cfg.protocol = Protocol::ThreeStage;
                    } else {
                        throw ConfigError("protocol: unknown value " + v);
                    }
                }
            } else if (key == "attack") {
                if (!given("--attack")) {
                    const std::string v = value.get<std::string>();
                    if (v == "none") {
                        cfg.attack = Attack::None;
                    } else if (v == "intercept-resend") {
                        cfg.attack = Attack::InterceptResend;
                    } else if (v == "faked-state") {
                        cfg.attack = Attack::FakedState;
                    } else if (v == "siphon") {
                        cfg.attack = Attack::Siphon;
                    } else if (v == "mitm") {
                        cfg.attack = Attack::Mitm;
                    } else {
                        throw ConfigError("attack: unknown value " + v);
                    }
                }
            } else if (key == "pulses") {
                if (!given("--pulses")) {
                    cfg.pulses = value.get<long>();
                }
            } else if (key == "seed") {
                if (!given("--seed")) {
                    cfg.seed = value.get<std::uint64_t>();
                }
            } else if (key == "grid_size") {
                if (!given("--grid-size")) {
                    cfg.grid_size = value.get<int>();
                }
            } else if (key == "dead_slots") {
                if (!given("--dead-slots")) {
                    cfg.dead_slots = value.get<int>();
                }
            } else if (key == "authenticated") {
                if (!given("--authenticated")) {
                    cfg.authenticated = value.get<bool>();
                }
            } else if (key == "siphon_photons") {
                if (!given("--siphon-photons")) {
                    cfg.siphon_photons = value.get<int>();
                }
            } else if (key == "repeat") {
                if (!given("--repeat")) {
                    cfg.repeat = value.get<int>();
                }
            } else if (key == "trace") {
                if (!given("--trace")) {
                    cfg.trace_path = value.get<std::string>();
                }
            } else if (key == "report") {
                if (!given("--report")) {
                    cfg.report_path = value.get<std::string>();
                }
            } else {
                throw ConfigError("config: unknown key \"" + key + "\"");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad value type: ") + e.what());
    }
}

} // namespace

ScenarioConfig parse_config(int argc, const char* const* argv) {
    ScenarioConfig cfg;
    std::string config_path;
    bool seed_given_on_cli = false;

    CLI::App app{"Polarization-encoded quantum key distribution simulator"};
    app.require_subcommand(1);
    CLI::App* run = app.add_subcommand("run", "Execute one scenario");

    const std::map<std::string, Protocol> protocols{{"bb84", Protocol::Bb84},
                                                    {"three-stage", Protocol::ThreeStage}};
    const std::map<std::string, Attack> attacks{{"none", Attack::None},
                                                {"intercept-resend", Attack::InterceptResend},
                                                {"faked-state", Attack::FakedState},
                                                {"siphon", Attack::Siphon},
                                                {"mitm", Attack::Mitm}};

    run->add_option("--protocol", cfg.protocol, "Protocol to run")
        ->transform(CLI::CheckedTransformer(protocols, CLI::ignore_case));
    run->add_option("--attack", cfg.attack, "Eavesdropping strategy")
        ->transform(CLI::CheckedTransformer(attacks, CLI::ignore_case));
    run->add_option("--pulses", cfg.pulses, "Number of pulses (bb84) or rounds (three-stage)");
    auto* seed_opt = run->add_option("--seed", cfg.seed, "Base seed for all streams");
    run->add_option("--grid-size", cfg.grid_size, "Rotation grid size (three-stage)");
    run->add_option("--dead-slots", cfg.dead_slots, "Detector recharge time in slots");
    run->add_flag("--authenticated", cfg.authenticated, "Authenticate the classical channel");
    run->add_option("--siphon-photons", cfg.siphon_photons,
                    "Photons diverted per stage per round (siphon attack)");
    run->add_option("--repeat", cfg.repeat, "Independent trials to run");
    run->add_option("--trace", cfg.trace_path, "Per-pulse trace output path");
    run->add_option("--report", cfg.report_path, "Summary report output path");
    run->add_option("--config", config_path, "JSON config file (flags override file values)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        throw HelpRequested{app.help()};
    } catch (const CLI::CallForAllHelp& e) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::CallForVersion& e) {
        throw HelpRequested{std::string(e.what()) + "\n"};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    seed_given_on_cli = seed_opt->count() > 0;
    if (!config_path.empty()) {
        merge_config_file(config_path, *run, cfg);
    }

    if (!seed_given_on_cli) {
        // A file seed already replaced the default; the environment only
        // fills in when neither flag nor file named one.
        const char* env_seed = std::getenv("QKD_SIM_SEED");
        if (env_seed != nullptr && run->count("--seed") == 0) {
            bool file_had_seed = false;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                nlohmann::json j;
                in >> j;
                file_had_seed = j.contains("seed");
            }
            if (!file_had_seed) {
                try {
                    cfg.seed = std::stoull(env_seed);
                } catch (const std::exception&) {
                    throw ConfigError("QKD_SIM_SEED: not a valid integer");
                }
            }
        }
    }

    validate_config(cfg);
    return cfg;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, int trial) {
    validate_config(cfg);

    Transcript transcript;
    if (cfg.protocol == Protocol::Bb84) {
        transcript = run_bb84(cfg, trial);
    } else if (cfg.attack == Attack::Mitm) {
        transcript = run_mitm(cfg, trial);
    } else {
        transcript = run_three_stage(cfg, trial);
    }

    RunReport report = summarize(transcript);
    if (!report.all_checks_passed()) {
        std::string failing;
        for (const auto& [name, ok] : report.checks) {
            if (!ok) {
                failing += failing.empty() ? name : ", " + name;
            }
        }
        throw InvariantError("self-check failed: " + failing);
    }
    return ScenarioResult{std::move(transcript), std::move(report)};
}

std::string render_trace(const Transcript& t) {
    std::string out;
    out.reserve(t.records.size() * 96);
    char line[256];
    for (const TraceRecord& r : t.records) {
        std::snprintf(line, sizeof(line),
                      "index=%d protocol=%s alice_bit=%d alice_basis=%c eve_action=%s "
                      "bob_basis=%c detection=%s sifted=%d\n",
                      r.index, t.config.protocol.c_str(), r.alice_bit, r.alice_basis,
                      r.eve_action.c_str(), r.bob_basis, detection_text(r.detection).c_str(),
                      r.sifted ? 1 : 0);
        out += line;
    }
    return out;
}

std::string render_report(const RunReport& report, const ScenarioEcho& echo) {
    nlohmann::json j;
    j["config"] = {
        {"protocol", echo.protocol},
        {"attack", echo.attack},
        {"pulses", echo.pulses},
        {"seed", echo.seed},
        {"grid_size", echo.grid_size},
        {"dead_slots", echo.dead_slots},
        {"authenticated", echo.authenticated},
        {"siphon_photons", echo.siphon_photons},
        {"repeat", echo.repeat},
        {"trial", echo.trial},
    };
    nlohmann::json results = {
        {"pulses_sent", report.pulses_sent},
        {"detections", report.detections},
        {"detection_rate", report.detection_rate},
        {"sift_fraction", report.sift_fraction},
        {"sifted_length", report.sifted_length},
        {"qber", report.qber},
        {"qber_empty_keys", report.qber_empty_keys},
        {"eve_knowledge_fraction", report.eve_knowledge_fraction},
        {"eve_no_coverage", report.eve_no_coverage},
    };
    if (report.mitm) {
        results["mitm_detected"] = report.mitm_detected;
        results["eve_knowledge_alice_leg"] = report.eve_knowledge_alice_leg;
        results["eve_knowledge_bob_leg"] = report.eve_knowledge_bob_leg;
    }
    if (report.siphon) {
        results["siphon_estimate_success"] = report.siphon_estimate_success;
    }
    j["results"] = results;
    j["checks"] = report.checks;
    return j.dump(2) + "\n";
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw IoError("failed while writing " + path);
    }
}

} // namespace

void write_trace(const Transcript& transcript, const std::string& path) {
    write_file(path, render_trace(transcript));
}

void write_report(const RunReport& report, const ScenarioEcho& echo, const std::string& path) {
    write_file(path, render_report(report, echo));
}

std::string trial_path(const std::string& base, int trial, int repeat) {
    if (repeat <= 1) {
        return base;
    }
    return base + ".trial" + std::to_string(trial);
}

} // namespace qkdsim
