#pragma once

#include "qkdsim/random.hpp"

namespace qkdsim {

/// Angle comparisons treat values closer than this as equal.
inline constexpr double kAngleToleranceDeg = 1e-9;

/// Canonicalize an angle into [0, period).
double canonical_angle(double angle_deg, double period_deg);

/// Circular equality modulo `period_deg` within kAngleToleranceDeg.
bool angles_equal(double a_deg, double b_deg, double period_deg);

/// Linear polarization of a single photon, as an angle in degrees.
/// Linear polarization is invariant under 180-degree shifts, so the angle is
/// kept canonical in [0, 180).
class PolarizationState {
public:
    explicit PolarizationState(double angle_deg)
        : angle_(canonical_angle(angle_deg, 180.0)) {}

    double angle() const noexcept { return angle_; }

    friend bool operator==(const PolarizationState& a, const PolarizationState& b) {
        return angles_equal(a.angle_, b.angle_, 180.0);
    }

private:
    double angle_;
};

enum class BasisKind { Z, X };

/// Measurement basis. Z is rectilinear, X diagonal.
///
/// Bit encoding convention: vertical (90) and -45 diagonal (135) carry 0;
/// horizontal (0) and +45 diagonal (45) carry 1. The two analyzer angles of
/// a basis are exactly 90 degrees apart.
struct Basis {
    BasisKind kind;

    double bit_angle(int bit) const {
        if (kind == BasisKind::Z) {
            return bit == 1 ? 0.0 : 90.0;
        }
        return bit == 1 ? 45.0 : 135.0;
    }

    Basis other() const { return Basis{kind == BasisKind::Z ? BasisKind::X : BasisKind::Z}; }
    char symbol() const { return kind == BasisKind::Z ? 'Z' : 'X'; }

    bool operator==(const Basis&) const = default;
};

inline constexpr Basis kBasisZ{BasisKind::Z};
inline constexpr Basis kBasisX{BasisKind::X};

/// Probability that a photon polarized at `state_angle_deg` passes an
/// analyzer at `analyzer_angle_deg`: cos^2 of the angle between them.
///
/// Exact at the special alignments: an aligned or orthogonal state gives
/// probability exactly 1 or 0 (so eigenstate measurements are
/// deterministic), and a 45-degree offset gives exactly 0.5.
double born_probability(double state_angle_deg, double analyzer_angle_deg);

/// P(measuring `state` in `basis` yields `bit`). The two outcomes of a basis
/// sum to 1 exactly: P(0) is defined as 1 - P(1).
double outcome_probability(const PolarizationState& state, Basis basis, int bit);

/// Map a classical bit onto the polarization the basis assigns to it.
PolarizationState encode(int bit, Basis basis);

struct MeasureResult {
    int bit;
    PolarizationState post_state; ///< collapsed: encode(bit, basis)
};

/// Born-rule measurement with collapse. Consumes exactly one uniform draw
/// regardless of the outcome probabilities, so fixed seeds replay exactly.
MeasureResult measure(const PolarizationState& state, Basis basis, RandomStream& rng);

/// Uniform bit / uniform basis. Basis mapping: 0 -> Z, 1 -> X.
int draw_bit(RandomStream& rng);
Basis draw_basis(RandomStream& rng);

} // namespace qkdsim
