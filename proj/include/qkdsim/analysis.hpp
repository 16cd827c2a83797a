#pragma once

#include "qkdsim/intercept.hpp"
#include "qkdsim/protocol.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qkdsim {

struct QberResult {
    double value = 0.0;
    bool empty_keys = false; ///< set when there was nothing to compare
};

/// Fraction of sifted positions where the two keys disagree. The keys must
/// cover the same source indices; comparing misaligned keys is a usage
/// error. Empty keys compare as 0 with the warning flag set.
QberResult qber(const SiftedKey& a, const SiftedKey& b);

struct KnowledgeResult {
    double fraction = 0.0;
    bool no_coverage = false; ///< no eavesdropper record overlapped the key
};

/// Fraction of the reference key's positions where the eavesdropper's
/// recorded bit matches the reference bit. Positions without a record count
/// as unknown.
KnowledgeResult eve_knowledge(std::span<const EveNote> notes, const SiftedKey& reference);

/// Single-use pad. Consumed on first use; every later use is refused.
class OtpKey {
public:
    /// Each element must be 0 or 1.
    explicit OtpKey(std::vector<std::uint8_t> bits);
    static OtpKey from_sifted_key(const SiftedKey& key);

    std::size_t bit_count() const noexcept { return bits_.size(); }
    bool consumed() const noexcept { return consumed_; }

    /// Refuses a consumed key or one shorter than the requested bit count;
    /// the pad is never truncated or cycled.
    const std::vector<std::uint8_t>& take(std::size_t bits_needed);

private:
    std::vector<std::uint8_t> bits_;
    bool consumed_ = false;
};

/// Bitwise exclusive-or of the message with the pad. Encrypt and decrypt are
/// the same involution; each call consumes its key object.
std::vector<std::uint8_t> otp_encrypt(std::span<const std::uint8_t> plaintext, OtpKey& key);
std::vector<std::uint8_t> otp_decrypt(std::span<const std::uint8_t> ciphertext, OtpKey& key);

/// One line of the per-pulse trace.
struct TraceRecord {
    int index = 0;
    int alice_bit = 0;
    char alice_basis = 'Z';
    std::string eve_action = "none";
    char bob_basis = 'Z';
    Detection detection = Detection::no_click();
    bool sifted = false;
};

/// Configuration echo carried into every transcript and report.
struct ScenarioEcho {
    std::string protocol;
    std::string attack;
    long pulses = 0;
    std::uint64_t seed = 0;
    int grid_size = 0;
    int dead_slots = 1;
    bool authenticated = false;
    int siphon_photons = 0;
    int repeat = 1;
    int trial = 0;
};

/// Everything one scenario run produced.
struct Transcript {
    ScenarioEcho config;
    std::vector<TraceRecord> records;
    SiftedKey alice_key;
    SiftedKey bob_key;
    std::vector<EveNote> eve_notes;

    bool mitm = false;
    bool mitm_detected = false;
    SiftedKey eve_key_with_alice;
    SiftedKey eve_key_with_bob;

    bool siphon = false;
    long siphon_estimates_total = 0;
    long siphon_estimates_exact = 0;
};

/// Aggregated statistics of one run plus self-check outcomes.
struct RunReport {
    std::string protocol;
    std::string attack;
    std::uint64_t seed = 0;
    int trial = 0;

    long pulses_sent = 0;
    long detections = 0;
    long sifted_length = 0;
    double detection_rate = 0.0;
    double sift_fraction = 0.0;
    double qber = 0.0;
    double eve_knowledge_fraction = 0.0;
    bool qber_empty_keys = false;
    bool eve_no_coverage = false;

    bool mitm = false;
    bool mitm_detected = false;
    double eve_knowledge_alice_leg = 0.0;
    double eve_knowledge_bob_leg = 0.0;

    bool siphon = false;
    double siphon_estimate_success = 0.0;

    std::map<std::string, bool> checks;

    bool all_checks_passed() const;
};

/// Deterministic aggregation: the same transcript always yields the same
/// report. An empty transcript yields a zeroed report with the warning
/// flags set.
RunReport summarize(const Transcript& transcript);

} // namespace qkdsim
