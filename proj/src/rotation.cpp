#include "qkdsim/rotation.hpp"

#include <stdexcept>

namespace qkdsim {

RotationTransform RotationTransform::from_degrees(double degrees) {
    RotationTransform r;
    r.degrees_ = canonical_angle(degrees, 360.0);
    return r;
}

RotationTransform RotationTransform::from_grid(int index, int grid_size) {
    if (grid_size < 1) {
        throw std::invalid_argument("RotationTransform::from_grid: grid_size must be >= 1");
    }
    RotationTransform r;
    r.grid_size_ = grid_size;
    r.grid_index_ = ((index % grid_size) + grid_size) % grid_size;
    r.degrees_ = 360.0 * static_cast<double>(r.grid_index_) / static_cast<double>(grid_size);
    return r;
}

RotationTransform RotationTransform::inverse() const {
    if (on_grid()) {
        return from_grid((grid_size_ - grid_index_) % grid_size_, grid_size_);
    }
    return from_degrees(360.0 - degrees_);
}

RotationTransform compose(const RotationTransform& a, const RotationTransform& b) {
    if (a.on_grid() && b.on_grid() && a.grid_size_ == b.grid_size_) {
        return RotationTransform::from_grid((a.grid_index_ + b.grid_index_) % a.grid_size_,
                                            a.grid_size_);
    }
    return RotationTransform::from_degrees(a.degrees_ + b.degrees_);
}

PolarizationState apply_rotation(const PolarizationState& state, const RotationTransform& rot) {
    return PolarizationState(state.angle() + rot.degrees());
}

RotationTransform draw_rotation(RandomStream& rng, int grid_size) {
    if (grid_size < 1) {
        throw std::invalid_argument("draw_rotation: grid_size must be >= 1");
    }
    return RotationTransform::from_grid(rng.uniform_int(grid_size), grid_size);
}

} // namespace qkdsim
