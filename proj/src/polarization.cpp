#include "qkdsim/polarization.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdsim {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

bool near(double a, double b) {
    return std::fabs(a - b) <= kAngleToleranceDeg;
}
} // namespace

double canonical_angle(double angle_deg, double period_deg) {
    double r = std::fmod(angle_deg, period_deg);
    if (r < 0.0) {
        r += period_deg;
    }
    // fmod of a tiny negative can round back up to the period itself.
    if (r >= period_deg) {
        r = 0.0;
    }
    return r;
}

bool angles_equal(double a_deg, double b_deg, double period_deg) {
    const double d = canonical_angle(a_deg - b_deg, period_deg);
    return d <= kAngleToleranceDeg || period_deg - d <= kAngleToleranceDeg;
}

double born_probability(double state_angle_deg, double analyzer_angle_deg) {
    const double d = canonical_angle(state_angle_deg - analyzer_angle_deg, 180.0);
    if (near(d, 0.0) || near(d, 180.0)) {
        return 1.0;
    }
    if (near(d, 90.0)) {
        return 0.0;
    }
    if (near(d, 45.0) || near(d, 135.0)) {
        return 0.5;
    }
    const double c = std::cos(d * kPi / 180.0);
    return c * c;
}

double outcome_probability(const PolarizationState& state, Basis basis, int bit) {
    if (bit != 0 && bit != 1) {
        throw std::invalid_argument("outcome_probability: bit must be 0 or 1");
    }
    const double p1 = born_probability(state.angle(), basis.bit_angle(1));
    return bit == 1 ? p1 : 1.0 - p1;
}

PolarizationState encode(int bit, Basis basis) {
    if (bit != 0 && bit != 1) {
        throw std::invalid_argument("encode: bit must be 0 or 1");
    }
    return PolarizationState(basis.bit_angle(bit));
}

MeasureResult measure(const PolarizationState& state, Basis basis, RandomStream& rng) {
    const double p1 = born_probability(state.angle(), basis.bit_angle(1));
    const int bit = rng.uniform() < p1 ? 1 : 0;
    return MeasureResult{bit, encode(bit, basis)};
}

int draw_bit(RandomStream& rng) {
    return rng.uniform_int(2);
}

Basis draw_basis(RandomStream& rng) {
    return rng.uniform_int(2) == 0 ? kBasisZ : kBasisX;
}

} // namespace qkdsim
