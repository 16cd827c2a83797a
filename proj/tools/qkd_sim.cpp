#include "qkdsim/scenario.hpp"

#include <cstdio>
#include <iostream>

using namespace qkdsim;

namespace {

void print_summary(const RunReport& r) {
    std::printf("%s %s trial=%d pulses=%ld detections=%ld sift=%.4f qber=%.4f eve=%.4f",
                r.protocol.c_str(), r.attack.c_str(), r.trial, r.pulses_sent, r.detections,
                r.sift_fraction, r.qber, r.eve_knowledge_fraction);
    if (r.mitm) {
        std::printf(" mitm_detected=%s", r.mitm_detected ? "true" : "false");
    }
    if (r.siphon) {
        std::printf(" siphon_success=%.4f", r.siphon_estimate_success);
    }
    std::printf("\n");
}

} // namespace

int main(int argc, char** argv) {
    ScenarioConfig cfg;
    try {
        cfg = parse_config(argc, argv);
    } catch (const HelpRequested& h) {
        std::cout << h.text;
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        for (int trial = 0; trial < cfg.repeat; ++trial) {
            const ScenarioResult result = run_scenario(cfg, trial);
            if (!cfg.trace_path.empty()) {
                write_trace(result.transcript, trial_path(cfg.trace_path, trial, cfg.repeat));
            }
            if (!cfg.report_path.empty()) {
                write_report(result.report, result.transcript.config,
                             trial_path(cfg.report_path, trial, cfg.repeat));
            }
            print_summary(result.report);
        }
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
