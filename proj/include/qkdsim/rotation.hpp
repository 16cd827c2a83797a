#pragma once

#include "qkdsim/polarization.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

/// Polarization rotation by a fixed angle; the commuting secret
/// transformation of the three-pass key exchange.
///
/// Rotations drawn from a discrete grid of size N carry their integer grid
/// index, and composition/inversion on a shared grid stay in integer
/// arithmetic, so round trips cancel without floating-point drift.
class RotationTransform {
public:
    RotationTransform() : degrees_(0.0) {}

    static RotationTransform identity() { return RotationTransform(); }
    static RotationTransform from_degrees(double degrees);
    static RotationTransform from_grid(int index, int grid_size);

    double degrees() const noexcept { return degrees_; }
    bool on_grid() const noexcept { return grid_size_ > 0; }
    int grid_index() const noexcept { return grid_index_; }
    int grid_size() const noexcept { return grid_size_; }

    RotationTransform inverse() const;

    friend RotationTransform compose(const RotationTransform& a, const RotationTransform& b);

    friend bool operator==(const RotationTransform& a, const RotationTransform& b) {
        return angles_equal(a.degrees_, b.degrees_, 360.0);
    }

private:
    double degrees_;     // canonical in [0, 360)
    int grid_index_ = 0; // valid only when grid_size_ > 0
    int grid_size_ = 0;
};

/// Rotate a polarization state: angles add modulo 180.
PolarizationState apply_rotation(const PolarizationState& state, const RotationTransform& rot);

/// Uniform grid rotation: angle 360*k/grid_size for uniform k in [0, grid_size).
/// grid_size < 1 is a configuration error.
RotationTransform draw_rotation(RandomStream& rng, int grid_size);

} // namespace qkdsim
