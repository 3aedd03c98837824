#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "powder/config.hpp"
#include "powder/world.hpp"

namespace powder {

// Binary frame, little-endian:
//   u64 tick | u16 H | u16 W | u8 flags | u32 run_count | runs (u16 count, u8 element)
//   [| H*W pairs of i8 (vx, vy) when flags bit 0 is set]
// Velocity is quantized as round(v * 16) clamped to [-127, 127].
inline constexpr std::uint8_t kFrameVelocity = 1u << 0;
inline constexpr float kFrameVelocityScale = 16.0f;

struct SandboxFrame {
  std::uint64_t tick = 0;
  int height = 0;
  int width = 0;
  std::vector<ElementId> cells;
  bool has_velocity = false;
  std::vector<std::int8_t> vx;
  std::vector<std::int8_t> vy;
};

std::vector<std::uint8_t> encode_frame(const World& world, int slot, bool with_velocity);
SandboxFrame decode_frame(std::span<const std::uint8_t> bytes);

struct Control {
  enum class Kind { Brush, Wind, Pause, Resume, Step, Reset, Speed };
  Kind kind = Kind::Pause;
  int x = 0;
  int y = 0;
  int radius = 0;
  ElementId element = ElementId::Empty;
  float vx = 0;
  float vy = 0;
  SimConfig reset;
  double ticks_per_second = 0;
};

// {"type":"brush","x":3,"y":4,"radius":2,"element":"sand"}, {"type":"wind",...},
// {"type":"pause"}, {"type":"resume"}, {"type":"step"},
// {"type":"reset","params":{...}}, {"type":"speed","ticks_per_second":30}.
// `base` supplies defaults for reset. Throws DomainError on a bad message.
Control parse_control(std::string_view json_text, const SimConfig& base);

inline constexpr double kDefaultTicksPerSecond = 30.0;
inline constexpr int kMaxBrushRadius = 32;

// One simulated world on a single timeline. Controls are queued from any
// thread and applied in arrival order at the next tick boundary.
class SandboxSession {
 public:
  explicit SandboxSession(const SimConfig& config);

  void submit(const Control& control);

  // Applies queued controls, then advances one tick unless paused (a step
  // control while paused grants exactly one tick). Returns true when the
  // published frame changed.
  bool advance();

  std::uint64_t tick() const;
  std::uint64_t sequence() const;
  bool paused() const;
  double ticks_per_second() const;
  int height() const;
  int width() const;
  SimConfig config() const;

  // Latest published world, never a partially updated one.
  World snapshot() const;
  std::vector<std::uint8_t> frame(bool with_velocity, std::uint64_t* sequence = nullptr) const;

  // Blocks until the sequence number exceeds `after` or the timeout expires.
  bool wait_for_frame(std::uint64_t after, std::chrono::milliseconds timeout) const;
  // Blocks until a control is queued or the timeout expires.
  void wait_for_control(std::chrono::milliseconds timeout) const;

 private:
  void apply(const Control& c, bool& changed);
  void publish();

  SimConfig config_;
  World world_;

  mutable std::mutex queue_mu_;
  mutable std::condition_variable queue_cv_;
  std::deque<Control> queue_;

  mutable std::mutex pub_mu_;
  mutable std::condition_variable pub_cv_;
  World published_;
  std::uint64_t sequence_ = 0;
  bool paused_ = false;
  double tps_ = kDefaultTicksPerSecond;
  int pending_steps_ = 0;
};

// HTTP front end: GET /frame?after=N&velocity=1&timeout_ms=T (long poll,
// binary frame, X-Frame-Seq header), POST /control (one JSON control),
// GET /state (JSON). A malformed control gets a 400 and its connection is
// closed; the simulation carries on.
class SandboxServer {
 public:
  explicit SandboxServer(SandboxSession& session);
  ~SandboxServer();
  SandboxServer(const SandboxServer&) = delete;
  SandboxServer& operator=(const SandboxServer&) = delete;

  // Binds and starts the HTTP and simulation threads. Port 0 picks a free
  // port. Returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace powder
