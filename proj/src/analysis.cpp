#include "qkdsim/analysis.hpp"

#include <stdexcept>
#include <unordered_map>

namespace qkdsim {

QberResult qber(const SiftedKey& a, const SiftedKey& b) {
    if (a.bits.size() != b.bits.size() || a.source_indices != b.source_indices) {
        throw std::invalid_argument("qber: keys do not cover the same source indices");
    }
    if (a.bits.empty()) {
        return QberResult{0.0, true};
    }
    long mismatches = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        if (a.bits[i] != b.bits[i]) {
            ++mismatches;
        }
    }
    return QberResult{static_cast<double>(mismatches) / static_cast<double>(a.bits.size()), false};
}

KnowledgeResult eve_knowledge(std::span<const EveNote> notes, const SiftedKey& reference) {
    if (reference.bits.empty()) {
        return KnowledgeResult{0.0, true};
    }
    std::unordered_map<int, int> recorded;
    for (const EveNote& n : notes) {
        if (n.measured_bit.has_value()) {
            recorded[n.index] = *n.measured_bit;
        }
    }
    long covered = 0;
    long correct = 0;
    for (std::size_t i = 0; i < reference.bits.size(); ++i) {
        const auto it = recorded.find(reference.source_indices[i]);
        if (it == recorded.end()) {
            continue;
        }
        ++covered;
        if (it->second == reference.bits[i]) {
            ++correct;
        }
    }
    if (covered == 0) {
        return KnowledgeResult{0.0, true};
    }
    return KnowledgeResult{static_cast<double>(correct) /
                               static_cast<double>(reference.bits.size()),
                           false};
}

OtpKey::OtpKey(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (const auto b : bits_) {
        if (b > 1) {
            throw std::invalid_argument("OtpKey: key elements must be 0 or 1");
        }
    }
}

OtpKey OtpKey::from_sifted_key(const SiftedKey& key) {
    std::vector<std::uint8_t> bits;
    bits.reserve(key.bits.size());
    for (const int b : key.bits) {
        bits.push_back(static_cast<std::uint8_t>(b));
    }
    return OtpKey(std::move(bits));
}

const std::vector<std::uint8_t>& OtpKey::take(std::size_t bits_needed) {
    if (consumed_) {
        throw std::logic_error("OtpKey: key already consumed; a pad is used only once");
    }
    if (bits_.size() < bits_needed) {
        throw std::invalid_argument("OtpKey: key shorter than the message");
    }
    consumed_ = true;
    return bits_;
}

namespace {

std::vector<std::uint8_t> otp_xor(std::span<const std::uint8_t> data, OtpKey& key) {
    const std::vector<std::uint8_t>& bits = key.take(data.size() * 8);
    std::vector<std::uint8_t> out(data.begin(), data.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint8_t pad = 0;
        for (std::size_t j = 0; j < 8; ++j) {
            pad = static_cast<std::uint8_t>(pad | (bits[i * 8 + j] << j));
        }
        out[i] = static_cast<std::uint8_t>(out[i] ^ pad);
    }
    return out;
}

} // namespace

std::vector<std::uint8_t> otp_encrypt(std::span<const std::uint8_t> plaintext, OtpKey& key) {
    return otp_xor(plaintext, key);
}

std::vector<std::uint8_t> otp_decrypt(std::span<const std::uint8_t> ciphertext, OtpKey& key) {
    return otp_xor(ciphertext, key);
}

bool RunReport::all_checks_passed() const {
    for (const auto& [name, ok] : checks) {
        if (!ok) {
            return false;
        }
    }
    return true;
}

RunReport summarize(const Transcript& t) {
    RunReport r;
    r.protocol = t.config.protocol;
    r.attack = t.config.attack;
    r.seed = t.config.seed;
    r.trial = t.config.trial;

    r.pulses_sent = static_cast<long>(t.records.size());
    long sifted_records = 0;
    bool sift_implies_click = true;
    for (const TraceRecord& rec : t.records) {
        if (rec.detection.is_click()) {
            ++r.detections;
        }
        if (rec.sifted) {
            ++sifted_records;
            if (!rec.detection.is_click()) {
                sift_implies_click = false;
            }
        }
    }
    if (r.pulses_sent > 0) {
        r.detection_rate = static_cast<double>(r.detections) / static_cast<double>(r.pulses_sent);
        r.sift_fraction = static_cast<double>(sifted_records) / static_cast<double>(r.pulses_sent);
    }

    const QberResult q = qber(t.alice_key, t.bob_key);
    r.qber = q.value;
    r.qber_empty_keys = q.empty_keys;
    r.sifted_length = static_cast<long>(t.alice_key.size());

    const KnowledgeResult k = eve_knowledge(t.eve_notes, t.alice_key);
    r.eve_knowledge_fraction = k.fraction;
    r.eve_no_coverage = k.no_coverage;

    if (t.mitm) {
        r.mitm = true;
        r.mitm_detected = t.mitm_detected;
        const QberResult leg_a = qber(t.eve_key_with_alice, t.alice_key);
        const QberResult leg_b = qber(t.eve_key_with_bob, t.bob_key);
        r.eve_knowledge_alice_leg = leg_a.empty_keys ? 0.0 : 1.0 - leg_a.value;
        r.eve_knowledge_bob_leg = leg_b.empty_keys ? 0.0 : 1.0 - leg_b.value;
        if (!t.mitm_detected) {
            r.eve_knowledge_fraction =
                leg_a.empty_keys ? 0.0 : 1.0 - leg_a.value;
            r.eve_no_coverage = leg_a.empty_keys;
        }
    }

    if (t.siphon) {
        r.siphon = true;
        if (t.siphon_estimates_total > 0) {
            r.siphon_estimate_success = static_cast<double>(t.siphon_estimates_exact) /
                                        static_cast<double>(t.siphon_estimates_total);
        }
    }

    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    const long records = static_cast<long>(t.records.size());
    if (t.mitm) {
        r.checks["trace_count_matches"] =
            t.mitm_detected ? records == 0 : records <= t.config.pulses;
    } else {
        r.checks["trace_count_matches"] = records == t.config.pulses;
    }
    r.checks["detections_le_pulses"] = r.detections <= r.pulses_sent;
    r.checks["fractions_in_range"] = in_unit(r.detection_rate) && in_unit(r.sift_fraction) &&
                                     in_unit(r.qber) && in_unit(r.eve_knowledge_fraction);
    r.checks["keys_aligned"] = t.alice_key.bits.size() == t.alice_key.source_indices.size() &&
                               t.bob_key.bits.size() == t.bob_key.source_indices.size() &&
                               t.alice_key.source_indices == t.bob_key.source_indices;
    r.checks["sifted_records_clicked"] = sift_implies_click;
    return r;
}

} // namespace qkdsim
