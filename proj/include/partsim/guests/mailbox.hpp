// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <utility>

#include "partsim/machine/hart.hpp"

namespace partsim {

/// Shared-memory slots that carry IPI numbers next to payload-free doorbell
/// interrupts. One FIFO per (sender, receiver) pair; a number is delivered
/// exactly once and in posting order.
class Mailbox {
 public:
  void post(HartId from, HartId to, std::uint64_t number);
  std::optional<std::uint64_t> take(HartId from, HartId to);
  std::size_t queued(HartId from, HartId to) const;

  std::uint64_t posted() const { return posted_; }
  std::uint64_t taken() const { return taken_; }

 private:
  std::map<std::pair<HartId, HartId>, std::deque<std::uint64_t>> slots_;
  std::uint64_t posted_ = 0;
  std::uint64_t taken_ = 0;
};

}  // namespace partsim
