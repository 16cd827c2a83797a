#pragma once

#include "qkdsim/detector.hpp"
#include "qkdsim/rotation.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qkdsim {

/// What an eavesdropping strategy learned while handling one pulse.
/// Fields are present only when the strategy produced them.
struct EveNote {
    int index = -1;
    std::optional<int> measured_bit;
    std::optional<Basis> eve_basis;
    std::optional<RotationTransform> estimated_rotation;
};

/// Output of a channel tap: what travels on to the receiver, plus the
/// eavesdropper's record. The tap consumed its input pulse; nothing in this
/// interface duplicates an unmeasured quantum pulse.
struct TapResult {
    std::vector<Pulse> pulses;
    EveNote note;
};

/// A tap on one channel pass. An empty function is a transparent channel.
using ChannelTap = std::function<TapResult(Pulse)>;

/// Full control of the receiver's apparatus for the measurement slot: when
/// set, the returned detection replaces whatever the bank would register.
using DetectionOverride = std::function<Detection()>;

/// Interception points of one three-pass key-exchange round.
struct ThreeStageHooks {
    ChannelTap pass1; // sender -> receiver, first transit
    ChannelTap pass2; // receiver -> sender
    ChannelTap pass3; // sender -> receiver, final transit
    DetectionOverride override_detection;
};

} // namespace qkdsim
