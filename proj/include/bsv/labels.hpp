#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace bsv {

/// Body segment labels. The numeric values are the on-disk `segment` byte and
/// double as the ordinal used for tie-breaking (lowest wins).
enum class SegmentLabel : std::uint8_t {
  Background = 0,
  Head = 1,
  Torso = 2,
  LeftArm = 3,
  RightArm = 4,
  LeftForearm = 5,
  RightForearm = 6,
  LeftHand = 7,
  RightHand = 8,
  LeftThigh = 9,
  RightThigh = 10,
  LeftShin = 11,
  RightShin = 12,
  LeftFoot = 13,
  RightFoot = 14,
};

inline constexpr int kSegmentLabelCount = 15;  // including Background

inline constexpr std::array<SegmentLabel, 14> kBodySegments = {
    SegmentLabel::Head,         SegmentLabel::Torso,       SegmentLabel::LeftArm,
    SegmentLabel::RightArm,     SegmentLabel::LeftForearm, SegmentLabel::RightForearm,
    SegmentLabel::LeftHand,     SegmentLabel::RightHand,   SegmentLabel::LeftThigh,
    SegmentLabel::RightThigh,   SegmentLabel::LeftShin,    SegmentLabel::RightShin,
    SegmentLabel::LeftFoot,     SegmentLabel::RightFoot};

/// The nine segments whose volumes are evaluated.
inline constexpr std::array<SegmentLabel, 9> kEvaluatedSegments = {
    SegmentLabel::Torso,     SegmentLabel::LeftArm,    SegmentLabel::RightArm,
    SegmentLabel::LeftForearm, SegmentLabel::RightForearm, SegmentLabel::LeftThigh,
    SegmentLabel::RightThigh, SegmentLabel::LeftShin,  SegmentLabel::RightShin};

/// Head, hands and feet are dropped before registration.
inline constexpr std::array<SegmentLabel, 5> kExtremities = {
    SegmentLabel::Head, SegmentLabel::LeftHand, SegmentLabel::RightHand,
    SegmentLabel::LeftFoot, SegmentLabel::RightFoot};

enum class BodySide { Center, Left, Right };

enum class LimbFamily { None, Arm, Leg };

constexpr std::uint8_t ordinal(SegmentLabel l) { return static_cast<std::uint8_t>(l); }

std::string_view label_name(SegmentLabel label);
std::optional<SegmentLabel> label_from_name(std::string_view name);
std::optional<SegmentLabel> label_from_ordinal(int value);

bool is_extremity(SegmentLabel label);
bool is_limb(SegmentLabel label);
BodySide side_of(SegmentLabel label);
LimbFamily family_of(SegmentLabel label);
/// 0 upper, 1 lower, 2 hand/foot; -1 for non-limb labels.
int limb_level(SegmentLabel label);
/// Limb label for (family, side, level). Throws for invalid combinations.
SegmentLabel make_limb_label(LimbFamily family, BodySide side, int level);

/// Display colour used when writing label masks or coloured clouds.
std::array<std::uint8_t, 3> label_color(SegmentLabel label);

}  // namespace bsv
