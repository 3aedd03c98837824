#include "powder/sandbox.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "bytes.hpp"
#include "httplib.h"
#include "json_util.hpp"
#include "powder/errors.hpp"
#include "powder/kernel.hpp"
#include "powder/procgen.hpp"
#include "powder/world_file.hpp"

namespace powder {

using nlohmann::json;

namespace {

std::int8_t quantize_velocity(float v) {
  const float q = std::nearbyint(v * kFrameVelocityScale);
  return static_cast<std::int8_t>(std::clamp(q, -127.0f, 127.0f));
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const World& world, int slot, bool with_velocity) {
  const ConstSlotView v = world.slot(slot);
  if (v.height > 0xFFFF || v.width > 0xFFFF) throw DomainError("frame dimensions exceed u16");
  detail::ByteWriter out;
  out.u64(v.tick);
  out.u16(static_cast<std::uint16_t>(v.height));
  out.u16(static_cast<std::uint16_t>(v.width));
  out.u8(with_velocity ? kFrameVelocity : 0);
  const std::vector<ElementRun> runs = encode_runs(v.elem);
  out.u32(static_cast<std::uint32_t>(runs.size()));
  for (const ElementRun& r : runs) {
    out.u16(r.count);
    out.u8(static_cast<std::uint8_t>(to_index(r.element)));
  }
  if (with_velocity) {
    for (std::size_t i = 0; i < v.elem.size(); ++i) {
      out.u8(static_cast<std::uint8_t>(quantize_velocity(v.vx[i])));
      out.u8(static_cast<std::uint8_t>(quantize_velocity(v.vy[i])));
    }
  }
  return out.take();
}

SandboxFrame decode_frame(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  SandboxFrame f;
  f.tick = in.u64();
  const std::size_t dims_at = in.offset();
  f.height = in.u16();
  f.width = in.u16();
  if (f.height == 0 || f.width == 0) throw ParseError(dims_at, "zero frame dimension");
  const std::size_t flags_at = in.offset();
  const std::uint8_t flags = in.u8();
  if ((flags & ~kFrameVelocity) != 0) throw ParseError(flags_at, "unknown frame flags");
  f.has_velocity = (flags & kFrameVelocity) != 0;
  const std::uint32_t run_count = in.u32();
  const std::size_t n = static_cast<std::size_t>(f.height) * static_cast<std::size_t>(f.width);
  in.need(static_cast<std::size_t>(run_count) * 3, "runs");
  f.cells.reserve(n);
  for (std::uint32_t r = 0; r < run_count; ++r) {
    const std::size_t at = in.offset();
    const std::uint16_t count = in.u16();
    const std::uint8_t id = in.u8();
    if (count == 0) throw ParseError(at, "zero-length run");
    if (!is_valid_element(id)) throw ParseError(at + 2, "invalid element id");
    if (f.cells.size() + count > n) throw ParseError(at, "runs overflow the grid");
    f.cells.insert(f.cells.end(), count, static_cast<ElementId>(id));
  }
  if (f.cells.size() != n) throw ParseError(in.offset(), "runs do not cover the grid");
  if (f.has_velocity) {
    in.need(2 * n, "velocity overlay");
    f.vx.resize(n);
    f.vy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      f.vx[i] = static_cast<std::int8_t>(in.u8());
      f.vy[i] = static_cast<std::int8_t>(in.u8());
    }
  }
  if (in.remaining() != 0) throw ParseError(in.offset(), "trailing bytes after frame");
  return f;
}

namespace {

int int_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw DomainError(std::string("control needs integer '") + key + "'");
  }
  return j[key].get<int>();
}

float float_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw DomainError(std::string("control needs number '") + key + "'");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw DomainError(std::string("control field '") + key + "' must be finite");
  return static_cast<float>(v);
}

}  // namespace

Control parse_control(std::string_view json_text, const SimConfig& base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("malformed control: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw DomainError("control must be an object with a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  Control c;
  if (type == "brush") {
    c.kind = Control::Kind::Brush;
    c.x = int_field(j, "x");
    c.y = int_field(j, "y");
    c.radius = j.contains("radius") ? int_field(j, "radius") : 1;
    if (c.radius < 0 || c.radius > kMaxBrushRadius) throw DomainError("brush radius out of range");
    const json& e = j.value("element", json());
    if (e.is_string()) {
      const auto id = element_from_name(e.get<std::string>());
      if (!id) throw DomainError("unknown element '" + e.get<std::string>() + "'");
      c.element = *id;
    } else if (e.is_number_integer() && is_valid_element(e.get<int>())) {
      c.element = static_cast<ElementId>(e.get<int>());
    } else {
      throw DomainError("brush needs an element name or id");
    }
  } else if (type == "wind") {
    c.kind = Control::Kind::Wind;
    c.x = int_field(j, "x");
    c.y = int_field(j, "y");
    c.vx = float_field(j, "vx");
    c.vy = float_field(j, "vy");
  } else if (type == "pause") {
    c.kind = Control::Kind::Pause;
  } else if (type == "resume") {
    c.kind = Control::Kind::Resume;
  } else if (type == "step") {
    c.kind = Control::Kind::Step;
  } else if (type == "reset") {
    c.kind = Control::Kind::Reset;
    c.reset = base;
    detail::apply_json_overrides(c.reset, j.value("params", json()), "pcg.");
    detail::apply_json_overrides(c.reset, j.value("rules", json()), "rules.");
    c.reset.pcg.validate();
    c.reset.rules.validate();
    if (c.reset.pcg.height > 1024 || c.reset.pcg.width > 1024) throw DomainError("sandbox worlds are at most 1024x1024");
  } else if (type == "speed") {
    c.kind = Control::Kind::Speed;
    c.ticks_per_second = float_field(j, "ticks_per_second");
    if (c.ticks_per_second <= 0 || c.ticks_per_second > 1000) throw DomainError("ticks_per_second must be in (0, 1000]");
  } else {
    throw DomainError("unknown control type '" + type + "'");
  }
  return c;
}

SandboxSession::SandboxSession(const SimConfig& config)
    : config_(config), world_(gen_start_state(config.pcg)), published_(world_) {
  config_.rules.validate();
}

void SandboxSession::submit(const Control& control) {
  {
    std::lock_guard lock(queue_mu_);
    queue_.push_back(control);
  }
  queue_cv_.notify_all();
}

void SandboxSession::apply(const Control& c, bool& changed) {
  switch (c.kind) {
    case Control::Kind::Brush:
      if (world_.slot(0).in_bounds(c.x, c.y)) {
        draw_circle(world_, 0, c.x, c.y, c.radius, c.element);
        changed = true;
      }
      break;
    case Control::Kind::Wind:
      if (world_.slot(0).in_bounds(c.x, c.y)) {
        add_wind(world_, 0, c.x, c.y, c.vx, c.vy);
        changed = true;
      }
      break;
    case Control::Kind::Pause:
      paused_ = true;
      break;
    case Control::Kind::Resume:
      paused_ = false;
      pending_steps_ = 0;
      break;
    case Control::Kind::Step:
      if (paused_) ++pending_steps_;
      break;
    case Control::Kind::Reset:
      config_ = c.reset;
      world_ = gen_start_state(config_.pcg);
      changed = true;
      break;
    case Control::Kind::Speed:
      tps_ = c.ticks_per_second;
      break;
  }
}

bool SandboxSession::advance() {
  std::deque<Control> batch;
  {
    std::lock_guard lock(queue_mu_);
    batch.swap(queue_);
  }
  bool changed = false;
  {
    std::lock_guard lock(pub_mu_);
    for (const Control& c : batch) apply(c, changed);
  }
  bool tick = false;
  {
    std::lock_guard lock(pub_mu_);
    if (!paused_) {
      tick = true;
    } else if (pending_steps_ > 0) {
      --pending_steps_;
      tick = true;
    }
  }
  if (tick) {
    step_in_place(world_, config_.rules);
    changed = true;
  }
  if (changed || !batch.empty()) publish();
  return changed;
}

void SandboxSession::publish() {
  {
    std::lock_guard lock(pub_mu_);
    published_ = world_;
    ++sequence_;
  }
  pub_cv_.notify_all();
}

std::uint64_t SandboxSession::tick() const {
  std::lock_guard lock(pub_mu_);
  return published_.tick();
}

std::uint64_t SandboxSession::sequence() const {
  std::lock_guard lock(pub_mu_);
  return sequence_;
}

bool SandboxSession::paused() const {
  std::lock_guard lock(pub_mu_);
  return paused_;
}

double SandboxSession::ticks_per_second() const {
  std::lock_guard lock(pub_mu_);
  return tps_;
}

SimConfig SandboxSession::config() const {
  std::lock_guard lock(pub_mu_);
  return config_;
}

int SandboxSession::height() const {
  std::lock_guard lock(pub_mu_);
  return published_.height();
}

int SandboxSession::width() const {
  std::lock_guard lock(pub_mu_);
  return published_.width();
}

World SandboxSession::snapshot() const {
  std::lock_guard lock(pub_mu_);
  return published_;
}

std::vector<std::uint8_t> SandboxSession::frame(bool with_velocity, std::uint64_t* sequence) const {
  std::lock_guard lock(pub_mu_);
  if (sequence) *sequence = sequence_;
  return encode_frame(published_, 0, with_velocity);
}

bool SandboxSession::wait_for_frame(std::uint64_t after, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(pub_mu_);
  return pub_cv_.wait_for(lock, timeout, [&] { return sequence_ > after; });
}

void SandboxSession::wait_for_control(std::chrono::milliseconds timeout) const {
  std::unique_lock lock(queue_mu_);
  queue_cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); });
}

struct SandboxServer::Impl {
  SandboxSession& session;
  httplib::Server http;
  std::thread http_thread;
  std::thread sim_thread;
  std::atomic<bool> running{false};

  explicit Impl(SandboxSession& s) : session(s) {}

  void simulate() {
    using clock = std::chrono::steady_clock;
    auto next = clock::now();
    while (running.load()) {
      if (session.paused()) {
        session.wait_for_control(std::chrono::milliseconds(20));
        session.advance();
        next = clock::now();
        continue;
      }
      std::this_thread::sleep_until(next);
      session.advance();
      const auto period = std::chrono::duration_cast<clock::duration>(
          std::chrono::duration<double>(1.0 / session.ticks_per_second()));
      next += period;
      if (next < clock::now() - period) next = clock::now();
    }
  }

  void routes() {
    http.Get("/frame", [this](const httplib::Request& req, httplib::Response& res) {
      const bool velocity = req.get_param_value("velocity") == "1";
      if (req.has_param("after")) {
        try {
          const std::uint64_t after = std::stoull(req.get_param_value("after"));
          long timeout = req.has_param("timeout_ms") ? std::stol(req.get_param_value("timeout_ms")) : 1000;
          timeout = std::clamp(timeout, 0L, 10000L);
          session.wait_for_frame(after, std::chrono::milliseconds(timeout));
        } catch (const std::exception&) {
          res.status = 400;
          res.set_header("Connection", "close");
          res.set_content(R"({"error":"bad frame query"})", "application/json");
          return;
        }
      }
      std::uint64_t seq = 0;
      std::vector<std::uint8_t> bytes = session.frame(velocity, &seq);
      res.set_header("X-Frame-Seq", std::to_string(seq));
      res.set_content(std::string(bytes.begin(), bytes.end()), "application/octet-stream");
    });
    http.Post("/control", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const Control c = parse_control(req.body, session.config());
        if ((c.kind == Control::Kind::Brush || c.kind == Control::Kind::Wind) &&
            (c.x < 0 || c.y < 0 || c.x >= session.width() || c.y >= session.height())) {
          throw DomainError("control position out of range");
        }
        session.submit(c);
        res.set_content(json{{"ok", true}, {"sequence", session.sequence()}}.dump(), "application/json");
      } catch (const DomainError& e) {
        res.status = 400;
        res.set_header("Connection", "close");
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });
    http.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
      const json j{{"tick", session.tick()},
                   {"sequence", session.sequence()},
                   {"paused", session.paused()},
                   {"ticks_per_second", session.ticks_per_second()},
                   {"height", session.height()},
                   {"width", session.width()}};
      res.set_content(j.dump(), "application/json");
    });
  }
};

SandboxServer::SandboxServer(SandboxSession& session) : impl_(std::make_unique<Impl>(session)) {
  impl_->routes();
}

SandboxServer::~SandboxServer() { stop(); }

int SandboxServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->running = true;
  impl_->http_thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->sim_thread = std::thread([this] { impl_->simulate(); });
  return bound;
}

void SandboxServer::stop() {
  if (!impl_ || !impl_->running.exchange(false)) return;
  impl_->http.stop();
  if (impl_->http_thread.joinable()) impl_->http_thread.join();
  if (impl_->sim_thread.joinable()) impl_->sim_thread.join();
}

}  // namespace powder
