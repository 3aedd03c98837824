#include "powder/element.hpp"

#include <string>

#include "powder/errors.hpp"

namespace powder {

ElementId element_from_index(int id) {
  if (!is_valid_element(id)) {
    throw DomainError("element id out of range: " + std::to_string(id));
  }
  return static_cast<ElementId>(id);
}

const ElementProps& element_props(ElementId id) {
  const int i = to_index(id);
  if (!is_valid_element(i)) {
    throw DomainError("element id out of range: " + std::to_string(i));
  }
  return detail::kElementTable[static_cast<std::size_t>(i)];
}

std::string_view element_name(ElementId id) {
  return detail::kElementNames.at(static_cast<std::size_t>(to_index(id)));
}

std::optional<ElementId> element_from_name(std::string_view name) {
  for (int i = 0; i < kElementCount; ++i) {
    if (detail::kElementNames[static_cast<std::size_t>(i)] == name) {
      return static_cast<ElementId>(i);
    }
  }
  return std::nullopt;
}

}  // namespace powder
