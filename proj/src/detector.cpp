#include "qkdsim/detector.hpp"

#include <stdexcept>

namespace qkdsim {

DetectorBank::DetectorBank(int dead_slots) : dead_slots_(dead_slots) {
    if (dead_slots < 0) {
        throw std::invalid_argument("DetectorBank: dead_slots must be >= 0");
    }
    apds_[0] = Apd{ApdId{BasisKind::Z, 0}};
    apds_[1] = Apd{ApdId{BasisKind::Z, 1}};
    apds_[2] = Apd{ApdId{BasisKind::X, 0}};
    apds_[3] = Apd{ApdId{BasisKind::X, 1}};
}

void DetectorBank::apply_illumination(const Pulse& pulse) {
    const auto* blinding = std::get_if<BlindingPulse>(&pulse);
    if (blinding == nullptr) {
        return;
    }
    for (auto& apd : apds_) {
        if (blinding->targets.contains(apd.id) && apd.mode == ApdMode::Live) {
            apd.mode = ApdMode::Blinded;
        }
    }
}

Detection DetectorBank::register_click(ApdId id) {
    Apd& apd = apd_mut(id);
    if (dead_slots_ > 0) {
        apd.mode = ApdMode::Dead;
        apd.recharge_remaining = dead_slots_;
    }
    return Detection::click(id.bit);
}

Detection DetectorBank::detect(const Pulse& pulse, RandomStream& rng) {
    if (!selected_.has_value()) {
        throw std::logic_error("DetectorBank::detect: no basis selected for this slot");
    }
    const Basis basis = *selected_;

    if (const auto* quantum = std::get_if<QuantumPulse>(&pulse)) {
        const MeasureResult m = measure(quantum->state, basis, rng);
        const ApdId winner{basis.kind, m.bit};
        if (apd(winner).mode != ApdMode::Live) {
            return Detection::no_click();
        }
        return register_click(winner);
    }

    if (const auto* faked = std::get_if<FakedStatePulse>(&pulse)) {
        if (faked->basis != basis) {
            return Detection::no_click();
        }
        const ApdId target{faked->basis.kind, faked->bit};
        if (apd(target).mode != ApdMode::Live) {
            return Detection::no_click();
        }
        if (rng.uniform() < 0.5) {
            return register_click(target);
        }
        return Detection::no_click();
    }

    return Detection::no_click();
}

void DetectorBank::tick() {
    for (auto& apd : apds_) {
        switch (apd.mode) {
        case ApdMode::Blinded:
            apd.mode = ApdMode::Live;
            break;
        case ApdMode::Dead:
            if (--apd.recharge_remaining <= 0) {
                apd.mode = ApdMode::Live;
                apd.recharge_remaining = 0;
            }
            break;
        case ApdMode::Live:
            break;
        }
    }
}

} // namespace qkdsim
