#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "powder/tasks.hpp"

namespace powder {

// Line-oriented JSON protocol around a single environment.
//
//   {"op":"reset","kind":"sand_pushing","seed":3,"params":{"max_lines":2},"heldout":false}
//   {"op":"step","action":{"x":10,"y":20,"element":"wind","vx":7,"vy":3}}
//   {"op":"observe","encoding":"rle"}
//
// Every request line gets exactly one response line. Failures come back as
// {"error":{"code":...,"message":...}} with code one of bad_request,
// unknown_op, invalid_kind, no_episode, rejected_action, episode_done.
// Unknown request fields are ignored; an "id" field is echoed back.
class EnvSession {
 public:
  std::string handle(std::string_view line);

  const std::optional<EnvState>& state() const noexcept { return state_; }

 private:
  std::optional<EnvState> state_;
};

// Serves requests from `in` until EOF. Blank lines are skipped.
void serve_env(std::istream& in, std::ostream& out);

}  // namespace powder
