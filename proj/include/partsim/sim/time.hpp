// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace partsim {

using Cycles = std::uint64_t;

/// Virtual time in CPU cycles since simulation start. Plays the role of the
/// rdcycle counter seen by guests.
struct SimTime {
  Cycles cycles = 0;

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(Cycles delta) const { return SimTime{cycles + delta}; }
  constexpr Cycles operator-(SimTime earlier) const { return cycles - earlier.cycles; }

  static constexpr SimTime max() { return SimTime{std::numeric_limits<Cycles>::max()}; }
};

/// Nominal core clock used to convert cycles to seconds in reports (100 MHz).
inline constexpr double kNominalClockHz = 100.0e6;

constexpr double to_seconds(Cycles cycles) { return static_cast<double>(cycles) / kNominalClockHz; }

}  // namespace partsim
