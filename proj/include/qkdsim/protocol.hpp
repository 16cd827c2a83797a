#pragma once

#include "qkdsim/detector.hpp"
#include "qkdsim/intercept.hpp"
#include "qkdsim/random.hpp"
#include "qkdsim/rotation.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace qkdsim {

/// Bits surviving basis reconciliation, with the pulse indices they came
/// from. Both parties' sifted keys share source_indices.
struct SiftedKey {
    std::vector<int> bits;
    std::vector<int> source_indices;

    std::size_t size() const noexcept { return bits.size(); }
};

struct Bb84PulseRecord {
    int index = 0;
    int alice_bit = 0;
    Basis alice_basis = kBasisZ;
    Basis bob_basis = kBasisZ;
    Detection bob_detection = Detection::no_click();
    bool sifted = false;
};

struct AlicePreparation {
    int bit;
    Basis basis;
    Pulse pulse;
};

/// Draw a uniform bit and basis, emit the encoded photon.
AlicePreparation bb84_alice_prepare(RandomStream& rng);

struct BobMeasurement {
    Basis basis;
    Detection detection;
};

/// One receiver slot: select a uniform basis, absorb any blinding light in
/// the slot, detect the signal pulse (vacuum if the slot carries none), then
/// end the slot.
BobMeasurement bb84_bob_measure(DetectorBank& bank, std::span<const Pulse> pulses,
                                RandomStream& rng);

/// Same slot discipline with a caller-chosen basis.
Detection run_detection_slot(DetectorBank& bank, Basis basis, std::span<const Pulse> pulses,
                             RandomStream& rng);

/// Keep exactly the indices where the receiver clicked and the bases match;
/// marks the kept records and returns (sender key, receiver key).
std::pair<SiftedKey, SiftedKey> bb84_sift(std::vector<Bb84PulseRecord>& records);

/// True iff applying a then b equals applying b then a. Rotations always
/// commute; the check guards future transformation families.
bool verify_commuting(const RotationTransform& a, const RotationTransform& b);

struct ThreeStageRecord {
    int index = 0;
    int alice_bit = 0;
    RotationTransform alice_rotation;
    RotationTransform bob_rotation;
    /// State on the wire after each of the three transit transforms.
    std::array<PolarizationState, 3> stage_states{PolarizationState(0), PolarizationState(0),
                                                  PolarizationState(0)};
    Detection bob_detection = Detection::no_click();
};

/// One round of the three-pass exchange with fixed secret rotations.
///
/// The sender applies her rotation and transmits; the receiver applies his
/// and returns it; the sender removes hers; the receiver removes his and
/// measures in the agreed basis. Each transit routes through the matching
/// tap. Tap notes are appended to `tap_notes` when non-null.
ThreeStageRecord three_stage_run(int index, int alice_bit, Basis agreed_basis,
                                 const RotationTransform& alice_rotation,
                                 const RotationTransform& bob_rotation,
                                 const ThreeStageHooks& taps, DetectorBank& bank,
                                 RandomStream& rng_bob,
                                 std::vector<EveNote>* tap_notes = nullptr);

/// Convenience form drawing both rotations uniformly from the grid.
ThreeStageRecord three_stage_run(int index, int alice_bit, Basis agreed_basis, int grid_size,
                                 RandomStream& rng_alice, RandomStream& rng_bob,
                                 const ThreeStageHooks& taps, DetectorBank& bank,
                                 std::vector<EveNote>* tap_notes = nullptr);

} // namespace qkdsim
