#pragma once

#include <cstdint>
#include <span>

#include "decstore/layout.hpp"

namespace decstore {

struct DiffLimits {
  std::size_t max_edit_distance = 2000;
  std::size_t max_work = 200'000'000;  // snake steps before giving up
};

// Edit script turning `from` into `to`, minimal in inserted plus deleted bytes
// when the distance is within limits. Past the limits the differing middle is
// replaced wholesale. Equal-length replacements become alterations.
EditScript diff_bytes(std::span<const std::uint8_t> from, std::span<const std::uint8_t> to, DiffLimits limits = {});

}  // namespace decstore
