#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkdsim/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qkdsim;

namespace {

ScenarioConfig parse(std::vector<std::string> args) {
    std::vector<const char*> argv{"qkd-sim"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("a full flag set parses") {
    const ScenarioConfig cfg = parse({"run", "--protocol", "bb84", "--attack",
                                      "intercept-resend", "--pulses", "100000", "--seed", "42"});
    CHECK(cfg.protocol == Protocol::Bb84);
    CHECK(cfg.attack == Attack::InterceptResend);
    CHECK(cfg.pulses == 100000);
    CHECK(cfg.seed == 42);
    CHECK(cfg.grid_size == 1024);
    CHECK(cfg.dead_slots == 1);
    CHECK_FALSE(cfg.authenticated);
}

TEST_CASE("incompatible protocol/attack combinations are rejected") {
    CHECK_THROWS_AS(parse({"run", "--protocol", "bb84", "--attack", "mitm"}), ConfigError);
    CHECK_THROWS_AS(parse({"run", "--protocol", "bb84", "--attack", "siphon"}), ConfigError);
    CHECK_THROWS_AS(parse({"run", "--protocol", "three-stage", "--attack", "intercept-resend"}),
                    ConfigError);
    // faked-state is valid against both protocols.
    CHECK_NOTHROW(parse({"run", "--protocol", "bb84", "--attack", "faked-state"}));
    CHECK_NOTHROW(parse({"run", "--protocol", "three-stage", "--attack", "faked-state"}));
}

TEST_CASE("bounds are validated with the offending field named") {
    CHECK_THROWS_WITH_AS(parse({"run", "--pulses", "0"}),
                         doctest::Contains("pulses"), ConfigError);
    CHECK_THROWS_WITH_AS(parse({"run", "--grid-size", "1"}),
                         doctest::Contains("grid-size"), ConfigError);
    CHECK_THROWS_WITH_AS(parse({"run", "--dead-slots", "-1"}),
                         doctest::Contains("dead-slots"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse({"run", "--protocol", "three-stage", "--attack", "siphon"}),
        doctest::Contains("siphon-photons"), ConfigError);
}

TEST_CASE("unknown flags are rejected") {
    CHECK_THROWS_AS(parse({"run", "--bogus", "1"}), ConfigError);
}

TEST_CASE("config file fills in, flags override") {
    const auto path = temp_file("qkdsim_cfg.json");
    {
        std::ofstream out(path);
        out << R"({"protocol": "three-stage", "attack": "faked-state", "pulses": 10, "seed": 5})";
    }
    const ScenarioConfig from_file = parse({"run", "--config", path.string()});
    CHECK(from_file.protocol == Protocol::ThreeStage);
    CHECK(from_file.attack == Attack::FakedState);
    CHECK(from_file.pulses == 10);
    CHECK(from_file.seed == 5);

    const ScenarioConfig overridden =
        parse({"run", "--config", path.string(), "--pulses", "20"});
    CHECK(overridden.pulses == 20); // flag wins
    CHECK(overridden.seed == 5);    // file still supplies the rest
    std::filesystem::remove(path);
}

TEST_CASE("unknown config file keys are rejected") {
    const auto path = temp_file("qkdsim_cfg_bad.json");
    {
        std::ofstream out(path);
        out << R"({"pulses": 10, "photons": 3})";
    }
    CHECK_THROWS_WITH_AS(parse({"run", "--config", path.string()}),
                         doctest::Contains("photons"), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("missing config file is a config error") {
    CHECK_THROWS_AS(parse({"run", "--config", "/nonexistent/qkdsim.json"}), ConfigError);
}

TEST_CASE("trace schema: exactly the eight fields in order") {
    ScenarioConfig cfg;
    cfg.pulses = 5;
    cfg.seed = 11;
    const ScenarioResult result = run_scenario(cfg);
    const std::string trace = render_trace(result.transcript);

    std::istringstream lines(trace);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::vector<std::string> keys;
        std::string token;
        while (fields >> token) {
            keys.push_back(token.substr(0, token.find('=')));
        }
        const std::vector<std::string> expected{"index",      "protocol",  "alice_bit",
                                                "alice_basis", "eve_action", "bob_basis",
                                                "detection",  "sifted"};
        REQUIRE(keys == expected);
        ++count;
    }
    CHECK(count == 5);
}

TEST_CASE("trace record count equals the configured pulse count") {
    for (const Attack attack : {Attack::None, Attack::InterceptResend, Attack::FakedState}) {
        ScenarioConfig cfg;
        cfg.attack = attack;
        cfg.pulses = 321;
        cfg.seed = 13;
        const ScenarioResult result = run_scenario(cfg);
        CHECK(result.transcript.records.size() == 321);
        CHECK(result.report.pulses_sent == 321);
    }
    ScenarioConfig three;
    three.protocol = Protocol::ThreeStage;
    three.pulses = 123;
    three.seed = 13;
    CHECK(run_scenario(three).transcript.records.size() == 123);
}

TEST_CASE("same config yields byte-identical traces and reports") {
    ScenarioConfig cfg;
    cfg.attack = Attack::FakedState;
    cfg.pulses = 3000;
    cfg.seed = 17;
    const ScenarioResult a = run_scenario(cfg);
    const ScenarioResult b = run_scenario(cfg);
    CHECK(render_trace(a.transcript) == render_trace(b.transcript));
    CHECK(render_report(a.report, a.transcript.config) ==
          render_report(b.report, b.transcript.config));
}

TEST_CASE("different trials use different randomness") {
    ScenarioConfig cfg;
    cfg.pulses = 1000;
    cfg.seed = 19;
    cfg.repeat = 2;
    const ScenarioResult t0 = run_scenario(cfg, 0);
    const ScenarioResult t1 = run_scenario(cfg, 1);
    CHECK(render_trace(t0.transcript) != render_trace(t1.transcript));
}

TEST_CASE("report echoes seed and config for reproducibility") {
    ScenarioConfig cfg;
    cfg.protocol = Protocol::ThreeStage;
    cfg.attack = Attack::Mitm;
    cfg.pulses = 50;
    cfg.seed = 23;
    const ScenarioResult result = run_scenario(cfg);
    const std::string report = render_report(result.report, result.transcript.config);
    CHECK(report.find("\"seed\": 23") != std::string::npos);
    CHECK(report.find("\"protocol\": \"three-stage\"") != std::string::npos);
    CHECK(report.find("\"attack\": \"mitm\"") != std::string::npos);
    CHECK(report.find("\"pulses\": 50") != std::string::npos);
}

TEST_CASE("write_trace and write_report produce the rendered bytes") {
    ScenarioConfig cfg;
    cfg.pulses = 50;
    cfg.seed = 29;
    const ScenarioResult result = run_scenario(cfg);

    const auto trace_path = temp_file("qkdsim_trace.txt");
    const auto report_path = temp_file("qkdsim_report.json");
    write_trace(result.transcript, trace_path.string());
    write_report(result.report, result.transcript.config, report_path.string());

    const auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(slurp(trace_path) == render_trace(result.transcript));
    CHECK(slurp(report_path) == render_report(result.report, result.transcript.config));
    std::filesystem::remove(trace_path);
    std::filesystem::remove(report_path);
}

TEST_CASE("unwritable paths raise io errors") {
    ScenarioConfig cfg;
    cfg.pulses = 5;
    const ScenarioResult result = run_scenario(cfg);
    CHECK_THROWS_AS(write_trace(result.transcript, "/nonexistent_dir/trace.txt"), IoError);
    CHECK_THROWS_AS(
        write_report(result.report, result.transcript.config, "/nonexistent_dir/report.json"),
        IoError);
}

TEST_CASE("self-checks flag a corrupt transcript") {
    Transcript t;
    t.config.protocol = "bb84";
    t.config.attack = "none";
    t.config.pulses = 1;
    // A record marked sifted without a click violates the sifting rule.
    t.records.push_back(TraceRecord{0, 1, 'Z', "none", 'Z', Detection::no_click(), true});
    const RunReport r = summarize(t);
    CHECK_FALSE(r.checks.at("sifted_records_clicked"));
    CHECK_FALSE(r.all_checks_passed());

    Transcript short_trace;
    short_trace.config.pulses = 5; // five promised, none recorded
    CHECK_FALSE(summarize(short_trace).checks.at("trace_count_matches"));
}

TEST_CASE("trial paths are suffixed only when repeating") {
    CHECK(trial_path("out.txt", 0, 1) == "out.txt");
    CHECK(trial_path("out.txt", 0, 3) == "out.txt.trial0");
    CHECK(trial_path("out.txt", 2, 3) == "out.txt.trial2");
}

TEST_CASE("three-stage detections serialize with the agreed basis") {
    ScenarioConfig cfg;
    cfg.protocol = Protocol::ThreeStage;
    cfg.pulses = 10;
    cfg.seed = 31;
    const ScenarioResult result = run_scenario(cfg);
    const std::string trace = render_trace(result.transcript);
    CHECK(trace.find("alice_basis=Z") != std::string::npos);
    CHECK(trace.find("bob_basis=Z") != std::string::npos);
    CHECK(trace.find("detection=none") == std::string::npos); // clean rounds all click
}
