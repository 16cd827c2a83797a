#include "qkdsim/adversary.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qkdsim {

TapResult passthrough(Pulse pulse) {
    TapResult out;
    out.pulses.push_back(std::move(pulse));
    return out;
}

TapResult intercept_resend(Pulse pulse, RandomStream& rng) {
    const auto* quantum = std::get_if<QuantumPulse>(&pulse);
    if (quantum == nullptr) {
        return passthrough(std::move(pulse));
    }
    const Basis eve_basis = draw_basis(rng);
    const MeasureResult m = measure(quantum->state, eve_basis, rng);
    TapResult out;
    out.pulses.push_back(QuantumPulse{m.post_state});
    out.note.measured_bit = m.bit;
    out.note.eve_basis = eve_basis;
    return out;
}

TapResult faked_state_bb84(Pulse pulse, RandomStream& rng) {
    const auto* quantum = std::get_if<QuantumPulse>(&pulse);
    if (quantum == nullptr) {
        return passthrough(std::move(pulse));
    }
    const Basis eve_basis = draw_basis(rng);
    const MeasureResult m = measure(quantum->state, eve_basis, rng);
    TapResult out;
    out.pulses.push_back(BlindingPulse{DetectorSet::for_bit(1 - m.bit)});
    out.pulses.push_back(FakedStatePulse{eve_basis, m.bit});
    out.note.measured_bit = m.bit;
    out.note.eve_basis = eve_basis;
    return out;
}

ThreeStageHooks ThreeStageFakedState::hooks() {
    ThreeStageHooks h;
    h.pass1 = [this](Pulse p) -> TapResult {
        const auto* quantum = std::get_if<QuantumPulse>(&p);
        if (quantum == nullptr) {
            return passthrough(std::move(p));
        }
        const MeasureResult m = measure(quantum->state, agreed_, *rng_);
        note_.measured_bit = m.bit;
        note_.eve_basis = agreed_;
        TapResult out;
        out.pulses.push_back(QuantumPulse{m.post_state});
        out.note = note_;
        return out;
    };
    h.override_detection = [this]() -> Detection {
        if (!note_.measured_bit.has_value()) {
            return Detection::no_click();
        }
        return Detection::click(*note_.measured_bit);
    };
    return h;
}

namespace {

// Log-probability tables for the grid's angle differences, shared across
// calls with the same grid size.
struct FilterTables {
    int grid_size = -1;
    std::vector<double> log_pass;          // ln cos^2
    std::vector<double> log_absorb;        // ln sin^2
    std::vector<double> log_pass_oracle;   // 0 / -inf after thresholding
    std::vector<double> log_absorb_oracle;

    void rebuild(int n) {
        grid_size = n;
        log_pass.resize(n);
        log_absorb.resize(n);
        log_pass_oracle.resize(n);
        log_absorb_oracle.resize(n);
        const double ninf = -std::numeric_limits<double>::infinity();
        for (int d = 0; d < n; ++d) {
            const double delta = 360.0 * static_cast<double>(d) / static_cast<double>(n);
            const double p = born_probability(delta, 0.0);
            log_pass[d] = p > 0.0 ? std::log(p) : ninf;
            log_absorb[d] = p < 1.0 ? std::log(1.0 - p) : ninf;
            log_pass_oracle[d] = p >= 0.5 ? 0.0 : ninf;
            log_absorb_oracle[d] = p < 0.5 ? 0.0 : ninf;
        }
    }
};

thread_local FilterTables g_tables;

int filter_for_photon(long i, long m, int grid_size) {
    // Spread the batch evenly over the filter bank.
    return static_cast<int>(i * static_cast<long>(grid_size) / m % grid_size);
}

// ll[c] += weight * table[(c - f) mod n], as two contiguous runs.
void accumulate(std::vector<double>& ll, const std::vector<double>& table, int f, double weight) {
    const int n = static_cast<int>(ll.size());
    for (int c = f; c < n; ++c) {
        ll[c] += weight * table[c - f];
    }
    for (int c = 0; c < f; ++c) {
        ll[c] += weight * table[c - f + n];
    }
}

} // namespace

SiphonEstimate siphon_and_estimate(std::span<const Pulse> photons, int grid_size,
                                   SiphonMode mode, RandomStream& rng) {
    if (photons.empty()) {
        throw std::invalid_argument("siphon_and_estimate: empty photon batch");
    }
    if (grid_size < 2) {
        throw std::invalid_argument("siphon_and_estimate: grid_size must be >= 2");
    }
    const auto* first = std::get_if<QuantumPulse>(&photons.front());
    if (first == nullptr) {
        throw std::invalid_argument("siphon_and_estimate: batch must carry quantum pulses");
    }
    const double state_angle = first->state.angle();
    for (const Pulse& p : photons) {
        const auto* q = std::get_if<QuantumPulse>(&p);
        if (q == nullptr || !(q->state == first->state)) {
            throw std::invalid_argument(
                "siphon_and_estimate: batch must be identically polarized quantum pulses");
        }
    }

    if (g_tables.grid_size != grid_size) {
        g_tables.rebuild(grid_size);
    }
    const auto& lp = mode == SiphonMode::Oracle ? g_tables.log_pass_oracle : g_tables.log_pass;
    const auto& lq = mode == SiphonMode::Oracle ? g_tables.log_absorb_oracle : g_tables.log_absorb;

    // Run the photons through their filters and bin outcomes per filter.
    const long m = static_cast<long>(photons.size());
    std::vector<int> passes(grid_size, 0);
    std::vector<int> absorbs(grid_size, 0);
    for (long i = 0; i < m; ++i) {
        const int f = filter_for_photon(i, m, grid_size);
        const double filter_angle = 360.0 * static_cast<double>(f) / static_cast<double>(grid_size);
        const double p = born_probability(state_angle, filter_angle);
        const bool passed = mode == SiphonMode::Oracle ? p >= 0.5 : rng.uniform() < p;
        if (passed) {
            ++passes[f];
        } else {
            ++absorbs[f];
        }
    }

    std::vector<double> ll(grid_size, 0.0);
    for (int f = 0; f < grid_size; ++f) {
        if (passes[f] > 0) {
            accumulate(ll, lp, f, static_cast<double>(passes[f]));
        }
        if (absorbs[f] > 0) {
            accumulate(ll, lq, f, static_cast<double>(absorbs[f]));
        }
    }

    int best = 0;
    for (int c = 1; c < grid_size; ++c) {
        if (ll[c] > ll[best]) {
            best = c;
        }
    }
    double total = 0.0;
    for (int c = 0; c < grid_size; ++c) {
        total += std::exp(ll[c] - ll[best]);
    }

    SiphonEstimate est;
    est.grid_index = best;
    est.angle = PolarizationState(360.0 * static_cast<double>(best) /
                                  static_cast<double>(grid_size));
    est.confidence = total > 0.0 ? 1.0 / total : 0.0;
    return est;
}

void SiphonAttack::tap_stage(int stage, const Pulse& pulse) {
    const auto* quantum = std::get_if<QuantumPulse>(&pulse);
    if (quantum == nullptr || photons_ < 1) {
        return;
    }
    // The transit carries a weak multi-photon pulse; the diverted fraction
    // is modeled as `photons_` identical copies of its polarization.
    std::vector<Pulse> batch(static_cast<std::size_t>(photons_), Pulse{QuantumPulse{quantum->state}});
    estimates_[stage] = siphon_and_estimate(batch, grid_size_, mode_, *rng_);
}

ThreeStageHooks SiphonAttack::hooks() {
    ThreeStageHooks h;
    h.pass1 = [this](Pulse p) -> TapResult {
        tap_stage(0, p);
        return passthrough(std::move(p));
    };
    h.pass2 = [this](Pulse p) -> TapResult {
        tap_stage(1, p);
        return passthrough(std::move(p));
    };
    h.pass3 = [this](Pulse p) -> TapResult {
        tap_stage(2, p);
        return passthrough(std::move(p));
    };
    return h;
}

std::optional<PolarizationState> SiphonAttack::inferred_initial_state() const {
    if (!estimates_[0] || !estimates_[1] || !estimates_[2]) {
        return std::nullopt;
    }
    // stage1 = U_sender + s0, stage2 = U_sender + U_receiver + s0,
    // stage3 = U_receiver + s0, all mod 180.
    return PolarizationState(estimates_[0]->angle.angle() - estimates_[1]->angle.angle() +
                             estimates_[2]->angle.angle());
}

std::optional<int> SiphonAttack::inferred_bit(Basis agreed_basis) const {
    const auto s0 = inferred_initial_state();
    if (!s0.has_value()) {
        return std::nullopt;
    }
    const auto dist = [&](int bit) {
        const double d = canonical_angle(s0->angle() - agreed_basis.bit_angle(bit), 180.0);
        return std::min(d, 180.0 - d);
    };
    return dist(1) <= dist(0) ? 1 : 0;
}

std::optional<RotationTransform> SiphonAttack::estimated_sender_rotation() const {
    const auto s0 = inferred_initial_state();
    if (!s0.has_value()) {
        return std::nullopt;
    }
    return RotationTransform::from_degrees(
        canonical_angle(estimates_[0]->angle.angle() - s0->angle(), 180.0));
}

MitmOutcome mitm_three_stage(std::span<const int> alice_bits, Basis agreed_basis, int grid_size,
                             int dead_slots, bool authenticated, RandomStream& rng_alice,
                             RandomStream& rng_bob, RandomStream& rng_eve) {
    MitmOutcome out;
    if (authenticated) {
        // The classical handshake refuses the impersonated endpoint; no
        // quantum exchange happens.
        out.detected = true;
        return out;
    }

    DetectorBank eve_bank(dead_slots);
    DetectorBank bob_bank(dead_slots);
    const ThreeStageHooks clean{};

    for (std::size_t i = 0; i < alice_bits.size(); ++i) {
        const int idx = static_cast<int>(i);

        // Leg 1: Eve completes the transaction with the sender, playing the
        // receiver with her own rotations and her own apparatus.
        const ThreeStageRecord leg_a =
            three_stage_run(idx, alice_bits[i], agreed_basis, grid_size, rng_alice, rng_eve,
                            clean, eve_bank);
        if (!leg_a.bob_detection.is_click()) {
            continue;
        }
        const int learned = leg_a.bob_detection.bit();

        // Leg 2: Eve relays the learned bit to the real receiver, playing
        // the sender. Relaying keeps the two ends in agreement.
        const ThreeStageRecord leg_b = three_stage_run(idx, learned, agreed_basis, grid_size,
                                                       rng_eve, rng_bob, clean, bob_bank);
        if (!leg_b.bob_detection.is_click()) {
            continue;
        }

        out.alice_key.bits.push_back(alice_bits[i]);
        out.alice_key.source_indices.push_back(idx);
        out.eve_key_with_alice.bits.push_back(learned);
        out.eve_key_with_alice.source_indices.push_back(idx);
        out.eve_key_with_bob.bits.push_back(learned);
        out.eve_key_with_bob.source_indices.push_back(idx);
        out.bob_key.bits.push_back(leg_b.bob_detection.bit());
        out.bob_key.source_indices.push_back(idx);
    }
    return out;
}

} // namespace qkdsim
