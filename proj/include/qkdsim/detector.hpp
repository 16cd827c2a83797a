#pragma once

#include "qkdsim/polarization.hpp"
#include "qkdsim/random.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

namespace qkdsim {

/// Identifies one of the four avalanche photodiodes: (basis, bit).
struct ApdId {
    BasisKind basis;
    int bit;

    bool operator==(const ApdId&) const = default;
};

/// Small set of APD ids, used to address blinding light.
class DetectorSet {
public:
    static int index(ApdId id) {
        return (id.basis == BasisKind::Z ? 0 : 2) + id.bit;
    }

    /// The two detectors (one per basis) that register `bit`.
    static DetectorSet for_bit(int bit) {
        DetectorSet s;
        s.insert(ApdId{BasisKind::Z, bit});
        s.insert(ApdId{BasisKind::X, bit});
        return s;
    }

    void insert(ApdId id) { mask_ |= static_cast<std::uint8_t>(1u << index(id)); }
    bool contains(ApdId id) const { return (mask_ & (1u << index(id))) != 0; }
    bool empty() const { return mask_ == 0; }

    bool operator==(const DetectorSet&) const = default;

private:
    std::uint8_t mask_ = 0;
};

/// One slot's worth of light on the quantum channel.
struct QuantumPulse {
    PolarizationState state;
};

/// Classical bright-pulse forgery addressed at a single outcome: when the
/// receiver has selected `basis` and the (basis, bit) detector is live, the
/// apparatus can register `bit`; under any other basis selection it
/// registers nothing. Carries no polarization state.
struct FakedStatePulse {
    Basis basis;
    int bit;
};

/// Continuous light that holds the targeted detectors out of single-photon
/// mode for the current slot.
struct BlindingPulse {
    DetectorSet targets;
};

struct VacuumPulse {};

using Pulse = std::variant<QuantumPulse, FakedStatePulse, BlindingPulse, VacuumPulse>;

/// Per-detector operating mode. A live detector can click; a blinded one is
/// a classical photodiode for the rest of the slot; a dead one is recharging
/// and revives after its countdown of ticks.
enum class ApdMode { Live, Blinded, Dead };

struct Apd {
    ApdId id;
    ApdMode mode = ApdMode::Live;
    int recharge_remaining = 0; // >= 1 while Dead
};

/// Measurement outcome for one slot: a click carrying a bit, or nothing.
class Detection {
public:
    static Detection click(int bit) { return Detection(bit); }
    static Detection no_click() { return Detection(); }

    bool is_click() const noexcept { return bit_.has_value(); }
    int bit() const { return bit_.value(); }

    bool operator==(const Detection&) const = default;

private:
    Detection() = default;
    explicit Detection(int bit) : bit_(bit) {}
    std::optional<int> bit_;
};

/// Behavioral model of the receiver's four-APD apparatus.
///
/// Time is discrete pulse slots. Within a slot: select a basis, apply any
/// illumination, detect at most one signal pulse; tick() ends the slot.
/// A click puts the winning detector into Dead(dead_slots); blinding lasts
/// only until the next tick, so it must be re-asserted every slot.
class DetectorBank {
public:
    explicit DetectorBank(int dead_slots = 1);

    /// Route the slot's measurement to this basis. Detector modes unchanged.
    void select_basis(Basis basis) { selected_ = basis; }
    std::optional<Basis> selected_basis() const { return selected_; }

    /// Blinding light drives every targeted live detector into Blinded for
    /// the current slot. Other pulse variants leave the bank unchanged.
    void apply_illumination(const Pulse& pulse);

    /// Detect one pulse in the selected basis.
    ///
    ///  - Quantum: Born-rule measurement; the winning detector clicks only
    ///    if live, and a click starts its recharge countdown. One uniform
    ///    draw is consumed either way.
    ///  - FakedState(b, v): a click(v) with probability 0.5 when the
    ///    selected basis is b and the (b, v) detector is live (one draw);
    ///    never a click otherwise (no draw).
    ///  - Blinding light or vacuum alone: no click, no draw.
    ///
    /// Calling detect with no basis selected is a usage error.
    Detection detect(const Pulse& pulse, RandomStream& rng);

    /// End of slot: Dead countdowns decrement (reaching zero revives), and
    /// blinded detectors revert to live unless re-illuminated next slot.
    void tick();

    const Apd& apd(ApdId id) const { return apds_[DetectorSet::index(id)]; }
    int dead_slots() const noexcept { return dead_slots_; }

private:
    Apd& apd_mut(ApdId id) { return apds_[DetectorSet::index(id)]; }
    Detection register_click(ApdId id);

    std::array<Apd, 4> apds_;
    std::optional<Basis> selected_;
    int dead_slots_;
};

} // namespace qkdsim
