#pragma once

#include "qkdsim/detector.hpp"
#include "qkdsim/intercept.hpp"
#include "qkdsim/protocol.hpp"
#include "qkdsim/random.hpp"
#include "qkdsim/rotation.hpp"

#include <array>
#include <optional>
#include <span>

namespace qkdsim {

/// Forward the pulse untouched, learning nothing.
TapResult passthrough(Pulse pulse);

/// Measure the photon in a uniformly drawn basis and forward the collapsed
/// state re-encoded in that basis. Non-quantum pulses pass through with an
/// empty note.
TapResult intercept_resend(Pulse pulse, RandomStream& rng);

/// Detector-control attack on the two-basis protocol. Measure the photon in
/// a uniformly drawn basis, obtaining bit e in basis B; emit blinding light
/// at both detectors of the complement bit, followed by a faked-state pulse
/// addressed at outcome (B, e). The receiver can then only ever register
/// Eve's own bit in Eve's own basis.
TapResult faked_state_bb84(Pulse pulse, RandomStream& rng);

/// Apparatus takeover for one three-pass round: intercept the first-transit
/// photon, measure it in the agreed basis, and force the receiver's
/// equipment to register exactly that bit. The transformed photon only
/// matches the sender's bit half the time, which is what gives the attack
/// away.
class ThreeStageFakedState {
public:
    ThreeStageFakedState(Basis agreed_basis, RandomStream& rng)
        : agreed_(agreed_basis), rng_(&rng) {}

    /// Valid while this object is alive; build fresh hooks per round.
    ThreeStageHooks hooks();

    const EveNote& note() const { return note_; }

private:
    Basis agreed_;
    RandomStream* rng_;
    EveNote note_;
};

enum class SiphonMode {
    Bernoulli, ///< each photon passes its filter with the cos^2 probability
    Oracle,    ///< idealized deterministic extinction: pass iff cos^2 >= 1/2
};

struct SiphonEstimate {
    PolarizationState angle = PolarizationState(0); ///< chosen candidate, mod 180
    int grid_index = 0;                             ///< lowest index on ties
    double confidence = 0.0; ///< posterior mass of the winner under a uniform prior
};

/// Estimate the polarization angle shared by a batch of identical photons
/// diverted from one round-stage.
///
/// Photon i is sent through the polarizing filter at grid angle
/// 360*floor(i*grid_size/m)/grid_size, spreading the batch evenly over the
/// filter bank. The estimate is the maximum-likelihood grid candidate given
/// the pass/absorb outcomes.
///
/// An empty batch, a non-quantum pulse, or mixed polarizations in the batch
/// is an estimation error.
SiphonEstimate siphon_and_estimate(std::span<const Pulse> photons, int grid_size,
                                   SiphonMode mode, RandomStream& rng);

/// Beam-splitting attack on the three-pass exchange: divert a few photons
/// from every transit, estimate each transit's polarization, and reconstruct
/// the key bit from the three estimates. The signal photons continue
/// untouched, so the legitimate parties see a clean round.
class SiphonAttack {
public:
    SiphonAttack(int photons_per_stage, int grid_size, SiphonMode mode, RandomStream& rng)
        : photons_(photons_per_stage), grid_size_(grid_size), mode_(mode), rng_(&rng) {}

    /// Valid while this object is alive; build fresh per round.
    ThreeStageHooks hooks();

    const std::array<std::optional<SiphonEstimate>, 3>& estimates() const { return estimates_; }

    /// Initial-state angle implied by the three transit estimates:
    /// stage1 - stage2 + stage3 (mod 180).
    std::optional<PolarizationState> inferred_initial_state() const;

    /// Key bit read off the inferred initial state, nearest analyzer wins.
    std::optional<int> inferred_bit(Basis agreed_basis) const;

    /// Sender-rotation estimate (stage1 minus inferred initial state), as a
    /// mod-180 representative.
    std::optional<RotationTransform> estimated_sender_rotation() const;

private:
    void tap_stage(int stage, const Pulse& pulse);

    int photons_;
    int grid_size_;
    SiphonMode mode_;
    RandomStream* rng_;
    std::array<std::optional<SiphonEstimate>, 3> estimates_;
};

struct MitmOutcome {
    bool detected = false;
    SiftedKey alice_key;          ///< bits the sender believes she shares
    SiftedKey bob_key;            ///< bits the receiver ended up with
    SiftedKey eve_key_with_alice; ///< Eve's transcript of the sender leg
    SiftedKey eve_key_with_bob;   ///< Eve's transcript of the receiver leg
};

/// Impersonation attack: Eve completes a full three-pass transaction with
/// the sender while posing as the receiver, then relays every learned bit to
/// the real receiver while posing as the sender. Both legs run clean, so
/// neither side sees errors. An authenticated classical channel refuses the
/// impersonated handshake before any bit is exchanged.
MitmOutcome mitm_three_stage(std::span<const int> alice_bits, Basis agreed_basis, int grid_size,
                             int dead_slots, bool authenticated, RandomStream& rng_alice,
                             RandomStream& rng_bob, RandomStream& rng_eve);

} // namespace qkdsim
