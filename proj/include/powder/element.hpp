#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace powder {

// Frozen ordering: one-hot layout and every file format depend on it.
enum class ElementId : std::uint8_t {
  Empty = 0,
  Wall,
  Sand,
  Water,
  Gas,
  Wood,
  Fire,
  Plant,
  Ice,
  Dust,
  Stone,
  Lava,
  Acid,
  Cloner,
};

inline constexpr int kElementCount = 14;

struct ElementProps {
  bool is_gravity;
  int density;  // level in [0,4]
  bool is_fluid;
  bool is_burnable;
  double burn_chance;  // default ignition probability when touching fire
  bool is_static_solid;

  friend bool operator==(const ElementProps&, const ElementProps&) = default;
};

namespace detail {

// clang-format off
inline constexpr std::array<ElementProps, kElementCount> kElementTable{{
    //  grav  dens  fluid  burn   burn_p  static
    {true,  1, false, false, 0.0,  false},  // empty
    {false, 4, false, false, 0.0,  true },  // wall
    {true,  3, false, false, 0.0,  false},  // sand
    {true,  2, true,  false, 0.0,  false},  // water
    {true,  0, false, false, 0.0,  false},  // gas
    {false, 4, false, true,  0.05, false},  // wood
    {true,  0, false, false, 0.0,  false},  // fire
    {false, 4, false, true,  0.2,  false},  // plant
    {false, 4, false, false, 0.0,  false},  // ice
    {true,  3, false, true,  1.0,  false},  // dust
    {true,  4, false, false, 0.0,  false},  // stone
    {true,  2, true,  false, 0.0,  false},  // lava
    {true,  2, true,  false, 0.0,  false},  // acid
    {false, 4, false, false, 0.0,  false},  // cloner
}};
// clang-format on

inline constexpr std::array<std::string_view, kElementCount> kElementNames{
    "empty", "wall",  "sand", "water", "gas",  "wood", "fire",
    "plant", "ice",   "dust", "stone", "lava", "acid", "cloner"};

}  // namespace detail

constexpr int to_index(ElementId id) noexcept { return static_cast<int>(id); }

constexpr bool is_valid_element(int id) noexcept { return id >= 0 && id < kElementCount; }

// Throws DomainError when id is outside [0,13].
ElementId element_from_index(int id);

// Static properties of an element. Throws DomainError for an invalid id.
const ElementProps& element_props(ElementId id);

std::string_view element_name(ElementId id);
std::optional<ElementId> element_from_name(std::string_view name);

// Unchecked fast-path lookup for kernels that already hold a valid id.
constexpr const ElementProps& props_of(ElementId id) noexcept {
  return detail::kElementTable[static_cast<std::size_t>(id)];
}

}  // namespace powder
