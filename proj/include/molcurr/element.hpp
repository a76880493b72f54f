#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace molcurr {

struct ElementInfo {
  std::uint8_t atomic_number;
  std::string_view symbol;
  double mass;  // standard atomic weight, Da
};

// Looks up an element by its case-sensitive symbol ("C", "Cl", "Se").
// Returns nullptr for unknown symbols.
const ElementInfo *find_element(std::string_view symbol) noexcept;

const ElementInfo &element(std::uint8_t atomic_number);

inline constexpr std::uint8_t kHydrogen = 1;
inline constexpr std::uint8_t kCarbon = 6;

// Normal valence states used for implicit-hydrogen assignment, lowest first.
// Empty for elements outside the organic subset (no implicit H, no check).
std::span<const int> normal_valences(std::uint8_t atomic_number) noexcept;

// Maximum total valence for an atom of the given element and formal charge,
// or -1 when the element is not valence-checked.
int max_valence(std::uint8_t atomic_number, int formal_charge) noexcept;

// Lowest valence state compatible with `formal_charge`; -1 if unchecked.
int lowest_valence(std::uint8_t atomic_number, int formal_charge) noexcept;

}  // namespace molcurr
