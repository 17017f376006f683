// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace partsim {

/// Interrupt architecture used for wired sources and IPIs.
enum class IrqChip : std::uint8_t {
  PlicClint,  // PLIC for wired sources, CLINT/firmware for IPIs
  AiaDirect,  // APLIC in direct mode, ACLINT-SSWI for supervisor IPIs
  AiaMsi,     // APLIC in MSI mode feeding IMSIC files, MSIs for IPIs
};

inline constexpr IrqChip kAllIrqChips[] = {IrqChip::PlicClint, IrqChip::AiaDirect, IrqChip::AiaMsi};

std::string_view to_string(IrqChip chip);
std::optional<IrqChip> parse_irqchip(std::string_view text);

}  // namespace partsim
