#pragma once

#include <cstdint>
#include <string_view>

namespace essfree {

// Permutation of the binary alphabet {0, 1}.
enum class Perm : std::uint8_t { identity = 0, swap = 1 };

constexpr Perm operator*(Perm lhs, Perm rhs) noexcept {
  return static_cast<Perm>(static_cast<std::uint8_t>(lhs) ^ static_cast<std::uint8_t>(rhs));
}

constexpr Perm& operator*=(Perm& lhs, Perm rhs) noexcept { return lhs = lhs * rhs; }

constexpr Perm inverse(Perm p) noexcept { return p; }

constexpr unsigned apply(Perm p, unsigned letter) noexcept {
  return p == Perm::swap ? letter ^ 1u : letter;
}

constexpr bool is_swap(Perm p) noexcept { return p == Perm::swap; }

constexpr std::string_view to_string(Perm p) noexcept { return p == Perm::swap ? "s" : "1"; }

}  // namespace essfree
