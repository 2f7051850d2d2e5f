#pragma once

#include <array>
#include <string_view>

#include "sfa/errors.hpp"

namespace sfa {

// The four syntactic frames. F0/F1 state the action directly; F2/F3 state the
// goal with the action as a conditional cost. F1 and F3 carry the negation.
enum class Frame : int { F0 = 0, F1 = 1, F2 = 2, F3 = 3 };

inline constexpr std::array<Frame, 4> kAllFrames{Frame::F0, Frame::F1, Frame::F2, Frame::F3};

enum class Polarity { positive, negative };

constexpr Polarity polarity(Frame f) {
    return (f == Frame::F0 || f == Frame::F2) ? Polarity::positive : Polarity::negative;
}

constexpr std::size_t frame_index(Frame f) { return static_cast<std::size_t>(f); }

constexpr std::string_view frame_name(Frame f) {
    switch (f) {
        case Frame::F0: return "F0";
        case Frame::F1: return "F1";
        case Frame::F2: return "F2";
        case Frame::F3: return "F3";
    }
    return "F?";
}

inline Frame frame_from_name(std::string_view name) {
    for (Frame f : kAllFrames)
        if (frame_name(f) == name) return f;
    throw ConfigError("unknown frame tag: '" + std::string(name) + "'");
}

}  // namespace sfa
