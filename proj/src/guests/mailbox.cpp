// SPDX-License-Identifier: Apache-2.0
#include "partsim/guests/mailbox.hpp"

namespace partsim {

void Mailbox::post(HartId from, HartId to, std::uint64_t number) {
  slots_[{from, to}].push_back(number);
  ++posted_;
}

std::optional<std::uint64_t> Mailbox::take(HartId from, HartId to) {
  auto it = slots_.find({from, to});
  if (it == slots_.end() || it->second.empty()) return std::nullopt;
  const std::uint64_t n = it->second.front();
  it->second.pop_front();
  ++taken_;
  return n;
}

std::size_t Mailbox::queued(HartId from, HartId to) const {
  auto it = slots_.find({from, to});
  return it == slots_.end() ? 0 : it->second.size();
}

}  // namespace partsim
