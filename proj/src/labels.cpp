#include "bsv/labels.hpp"

#include "bsv/error.hpp"

namespace bsv {

namespace {

constexpr std::array<std::string_view, kSegmentLabelCount> kNames = {
    "background", "head",       "torso",       "left_arm",   "right_arm",
    "left_forearm", "right_forearm", "left_hand", "right_hand", "left_thigh",
    "right_thigh", "left_shin",  "right_shin",  "left_foot",  "right_foot"};

constexpr std::array<std::array<std::uint8_t, 3>, kSegmentLabelCount> kPalette = {{
    {0, 0, 0},       {230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
    {245, 130, 48},  {145, 30, 180}, {70, 240, 240}, {240, 50, 230}, {210, 245, 60},
    {250, 190, 212}, {0, 128, 128},  {220, 190, 255}, {170, 110, 40}, {128, 0, 0},
}};

}  // namespace

std::string_view label_name(SegmentLabel label) { return kNames.at(ordinal(label)); }

std::optional<SegmentLabel> label_from_name(std::string_view name) {
  for (int i = 0; i < kSegmentLabelCount; ++i) {
    if (kNames[i] == name) return static_cast<SegmentLabel>(i);
  }
  return std::nullopt;
}

std::optional<SegmentLabel> label_from_ordinal(int value) {
  if (value < 0 || value >= kSegmentLabelCount) return std::nullopt;
  return static_cast<SegmentLabel>(value);
}

bool is_extremity(SegmentLabel label) {
  for (auto e : kExtremities) {
    if (e == label) return true;
  }
  return false;
}

bool is_limb(SegmentLabel label) { return ordinal(label) >= ordinal(SegmentLabel::LeftArm); }

BodySide side_of(SegmentLabel label) {
  if (!is_limb(label)) return BodySide::Center;
  return (ordinal(label) - ordinal(SegmentLabel::LeftArm)) % 2 == 0 ? BodySide::Left
                                                                   : BodySide::Right;
}

LimbFamily family_of(SegmentLabel label) {
  if (!is_limb(label)) return LimbFamily::None;
  return ordinal(label) < ordinal(SegmentLabel::LeftThigh) ? LimbFamily::Arm : LimbFamily::Leg;
}

int limb_level(SegmentLabel label) {
  if (!is_limb(label)) return -1;
  const int base = family_of(label) == LimbFamily::Arm ? ordinal(SegmentLabel::LeftArm)
                                                       : ordinal(SegmentLabel::LeftThigh);
  return (ordinal(label) - base) / 2;
}

SegmentLabel make_limb_label(LimbFamily family, BodySide side, int level) {
  if (family == LimbFamily::None || side == BodySide::Center || level < 0 || level > 2) {
    throw InvalidArgument("make_limb_label: invalid family/side/level combination");
  }
  const int base = family == LimbFamily::Arm ? ordinal(SegmentLabel::LeftArm)
                                             : ordinal(SegmentLabel::LeftThigh);
  return static_cast<SegmentLabel>(base + 2 * level + (side == BodySide::Right ? 1 : 0));
}

std::array<std::uint8_t, 3> label_color(SegmentLabel label) { return kPalette.at(ordinal(label)); }

}  // namespace bsv
