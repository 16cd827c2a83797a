#include "qkdsim/protocol.hpp"

#include <optional>

namespace qkdsim {

AlicePreparation bb84_alice_prepare(RandomStream& rng) {
    const int bit = draw_bit(rng);
    const Basis basis = draw_basis(rng);
    return AlicePreparation{bit, basis, QuantumPulse{encode(bit, basis)}};
}

Detection run_detection_slot(DetectorBank& bank, Basis basis, std::span<const Pulse> pulses,
                             RandomStream& rng) {
    bank.select_basis(basis);
    const Pulse* signal = nullptr;
    for (const Pulse& p : pulses) {
        if (std::holds_alternative<BlindingPulse>(p)) {
            bank.apply_illumination(p);
        } else {
            signal = &p;
        }
    }
    const Detection d =
        signal != nullptr ? bank.detect(*signal, rng) : bank.detect(Pulse{VacuumPulse{}}, rng);
    bank.tick();
    return d;
}

BobMeasurement bb84_bob_measure(DetectorBank& bank, std::span<const Pulse> pulses,
                                RandomStream& rng) {
    const Basis basis = draw_basis(rng);
    return BobMeasurement{basis, run_detection_slot(bank, basis, pulses, rng)};
}

std::pair<SiftedKey, SiftedKey> bb84_sift(std::vector<Bb84PulseRecord>& records) {
    SiftedKey alice;
    SiftedKey bob;
    for (auto& rec : records) {
        rec.sifted = rec.bob_detection.is_click() && rec.alice_basis == rec.bob_basis;
        if (rec.sifted) {
            alice.bits.push_back(rec.alice_bit);
            alice.source_indices.push_back(rec.index);
            bob.bits.push_back(rec.bob_detection.bit());
            bob.source_indices.push_back(rec.index);
        }
    }
    return {std::move(alice), std::move(bob)};
}

bool verify_commuting(const RotationTransform& a, const RotationTransform& b) {
    return compose(a, b) == compose(b, a);
}

namespace {

struct PassOutput {
    std::optional<PolarizationState> state; // quantum content, if any survived
    std::vector<Pulse> extras;              // non-quantum pulses to forward
};

PassOutput run_pass(const ChannelTap& tap, PolarizationState state,
                    std::vector<EveNote>* tap_notes) {
    PassOutput out;
    if (!tap) {
        out.state = state;
        return out;
    }
    TapResult result = tap(Pulse{QuantumPulse{state}});
    if (tap_notes != nullptr) {
        tap_notes->push_back(result.note);
    }
    for (Pulse& p : result.pulses) {
        if (const auto* q = std::get_if<QuantumPulse>(&p)) {
            out.state = q->state;
        } else if (!std::holds_alternative<VacuumPulse>(p)) {
            out.extras.push_back(std::move(p));
        }
    }
    return out;
}

} // namespace

ThreeStageRecord three_stage_run(int index, int alice_bit, Basis agreed_basis,
                                 const RotationTransform& alice_rotation,
                                 const RotationTransform& bob_rotation,
                                 const ThreeStageHooks& taps, DetectorBank& bank,
                                 RandomStream& rng_bob, std::vector<EveNote>* tap_notes) {
    ThreeStageRecord rec;
    rec.index = index;
    rec.alice_bit = alice_bit;
    rec.alice_rotation = alice_rotation;
    rec.bob_rotation = bob_rotation;

    const PolarizationState initial = encode(alice_bit, agreed_basis);

    // Transit 1: sender's rotation goes on.
    rec.stage_states[0] = apply_rotation(initial, alice_rotation);
    PassOutput p1 = run_pass(taps.pass1, rec.stage_states[0], tap_notes);

    // Transit 2: receiver's rotation goes on top.
    rec.stage_states[1] =
        p1.state.has_value() ? apply_rotation(*p1.state, bob_rotation) : rec.stage_states[0];
    PassOutput p2 = run_pass(taps.pass2, rec.stage_states[1], tap_notes);

    // Transit 3: sender's rotation comes off.
    rec.stage_states[2] = p2.state.has_value()
                              ? apply_rotation(*p2.state, alice_rotation.inverse())
                              : rec.stage_states[1];
    PassOutput p3 = run_pass(taps.pass3, rec.stage_states[2], tap_notes);

    if (taps.override_detection) {
        rec.bob_detection = taps.override_detection();
        return rec;
    }

    // Receiver removes his rotation and measures in the agreed basis.
    std::vector<Pulse> slot = std::move(p3.extras);
    if (p3.state.has_value()) {
        slot.push_back(QuantumPulse{apply_rotation(*p3.state, bob_rotation.inverse())});
    }
    rec.bob_detection = run_detection_slot(bank, agreed_basis, slot, rng_bob);
    return rec;
}

ThreeStageRecord three_stage_run(int index, int alice_bit, Basis agreed_basis, int grid_size,
                                 RandomStream& rng_alice, RandomStream& rng_bob,
                                 const ThreeStageHooks& taps, DetectorBank& bank,
                                 std::vector<EveNote>* tap_notes) {
    const RotationTransform alice_rotation = draw_rotation(rng_alice, grid_size);
    const RotationTransform bob_rotation = draw_rotation(rng_bob, grid_size);
    return three_stage_run(index, alice_bit, agreed_basis, alice_rotation, bob_rotation, taps,
                           bank, rng_bob, tap_notes);
}

} // namespace qkdsim
