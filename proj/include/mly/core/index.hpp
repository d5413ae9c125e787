#pragma once

// 128-bit orbit indices. Factorial and cubic block boundaries exceed 2^64
// long before they become numerically interesting, so every index in the
// library is an unsigned 128-bit integer capped at 2^127 - 1.

#include <cstdint>
#include <string>
#include <string_view>

namespace mly {

using Index = unsigned __int128;
using Wide = __int128;

inline constexpr Index kMaxIndex = (Index{1} << 127) - 1;

std::string to_string(Index value);
std::string to_string_signed(Wide value);

/// Parses a non-negative decimal literal. Throws IndexOverflow past kMaxIndex
/// and InvalidArgument on malformed input.
Index parse_index(std::string_view text);

double to_double(Index value) noexcept;

/// Checked arithmetic against kMaxIndex; throws Error(Overflow).
Index checked_add(Index a, Index b);
Index checked_mul(Index a, Index b);

/// Requires 1 <= i <= kMaxIndex, otherwise IndexOverflow / InvalidArgument.
void require_valid_index(Index i);

}  // namespace mly
