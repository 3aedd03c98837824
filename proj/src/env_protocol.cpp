#include "powder/env_protocol.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "json_util.hpp"
#include "powder/base64.hpp"
#include "powder/errors.hpp"
#include "powder/world_file.hpp"

namespace powder {

namespace {

using nlohmann::json;

struct ProtocolError {
  std::string code;
  std::string message;
};

json observation_json(const World& w, const std::string& encoding) {
  json obs;
  if (encoding == "full") {
    obs["shape"] = {w.height(), w.width(), channel::kCount};
    obs["encoding"] = "f32le_base64";
    obs["data"] = base64_encode(slot_channels(w, 0));
  } else if (encoding == "rle") {
    obs["shape"] = {w.height(), w.width()};
    obs["encoding"] = "rle";
    json runs = json::array();
    for (const ElementRun& r : encode_runs(w.slot(0).elem)) runs.push_back({r.count, to_index(r.element)});
    obs["runs"] = std::move(runs);
  } else {
    throw ProtocolError{"bad_request", "unknown encoding '" + encoding + "'"};
  }
  return obs;
}

int action_int(const json& v, const char* name) {
  if (!v.is_number_integer()) throw ProtocolError{"bad_request", std::string("action.") + name + " must be an integer"};
  return v.get<int>();
}

int element_token(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "wind") return kWindToken;
    if (const auto id = element_from_name(s)) return to_index(*id);
    throw ProtocolError{"rejected_action", "unknown element '" + s + "'"};
  }
  return action_int(v, "element");
}

Action parse_action(const json& req) {
  const json* a = nullptr;
  if (req.contains("action")) {
    a = &req["action"];
  } else if (req.contains("actions")) {
    a = &req["actions"];
  } else {
    throw ProtocolError{"bad_request", "step needs an action"};
  }
  Action out;
  if (a->is_array()) {
    if (a->size() != 5) throw ProtocolError{"bad_request", "action array must be [x, y, element, vx, vy]"};
    out.x = action_int((*a)[0], "x");
    out.y = action_int((*a)[1], "y");
    out.element = element_token((*a)[2]);
    out.vx_index = action_int((*a)[3], "vx");
    out.vy_index = action_int((*a)[4], "vy");
  } else if (a->is_object()) {
    out.x = action_int(a->value("x", json()), "x");
    out.y = action_int(a->value("y", json()), "y");
    out.element = element_token(a->value("element", json()));
    out.vx_index = a->contains("vx") ? action_int((*a)["vx"], "vx") : 0;
    out.vy_index = a->contains("vy") ? action_int((*a)["vy"], "vy") : 0;
  } else {
    throw ProtocolError{"bad_request", "action must be an array or an object"};
  }
  return out;
}

void describe(json& resp, const EnvState& s) {
  resp["tick"] = s.tick;
  resp["done"] = s.done;
  resp["episode_length"] = s.episode_length;
  resp["total_reward"] = s.total_reward;
  resp["digest"] = detail::hex64(world_digest(s.world, 0));
}

std::string error_line(const json& resp, const std::string& code, const std::string& message) {
  json err;
  if (resp.contains("id")) err["id"] = resp["id"];
  err["error"] = {{"code", code}, {"message", message}};
  return err.dump();
}

}  // namespace

std::string EnvSession::handle(std::string_view line) {
  json resp;
  json req;
  try {
    try {
      req = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ProtocolError{"bad_request", std::string("malformed JSON: ") + e.what()};
    }
    if (!req.is_object()) throw ProtocolError{"bad_request", "request must be a JSON object"};
    if (req.contains("id")) resp["id"] = req["id"];
    if (!req.contains("op") || !req["op"].is_string()) throw ProtocolError{"bad_request", "missing op"};
    const std::string op = req["op"].get<std::string>();
    resp["op"] = op;
    const json enc = req.value("encoding", json("full"));
    if (!enc.is_string()) throw ProtocolError{"bad_request", "encoding must be a string"};
    const std::string encoding = enc.get<std::string>();
    if (encoding != "full" && encoding != "rle" && encoding != "none") {
      throw ProtocolError{"bad_request", "unknown encoding '" + encoding + "'"};
    }

    if (op == "reset") {
      const json kind_v = req.value("kind", json());
      if (!kind_v.is_string()) throw ProtocolError{"invalid_kind", "kind must be a task name"};
      TaskKind kind;
      try {
        kind = task_kind_from_name(kind_v.get<std::string>());
      } catch (const DomainError& e) {
        throw ProtocolError{"invalid_kind", e.what()};
      }
      const json seed_v = req.value("seed", json(0));
      if (!seed_v.is_number_unsigned() && !(seed_v.is_number_integer() && seed_v.get<std::int64_t>() >= 0)) {
        throw ProtocolError{"bad_request", "seed must be a non-negative integer"};
      }
      const std::uint64_t seed = seed_v.get<std::uint64_t>();
      try {
        SimConfig cfg;
        cfg.pcg = default_task_params(kind);
        detail::apply_json_overrides(cfg, req.value("params", json()), "pcg.");
        detail::apply_json_overrides(cfg, req.value("rules", json()), "rules.");
        cfg.pcg.validate();
        cfg.rules.validate();
        const json heldout_v = req.value("heldout", json(false));
        if (!heldout_v.is_boolean()) throw ProtocolError{"bad_request", "heldout must be a boolean"};
        const bool heldout = heldout_v.get<bool>();
        state_ = heldout ? eval_heldout(kind, seed, cfg.rules) : env_reset(kind, cfg.pcg, seed, cfg.rules);
      } catch (const DomainError& e) {
        throw ProtocolError{"bad_request", e.what()};
      }
      describe(resp, *state_);
      if (encoding != "none") resp["obs"] = observation_json(state_->world, encoding);
    } else if (op == "step") {
      if (!state_) throw ProtocolError{"no_episode", "reset first"};
      const Action a = parse_action(req);
      StepResult r;
      try {
        r = env_step(*state_, a);
      } catch (const RejectedAction& e) {
        throw ProtocolError{"rejected_action", e.what()};
      } catch (const EpisodeDone& e) {
        throw ProtocolError{"episode_done", e.what()};
      }
      resp["reward"] = r.reward;
      describe(resp, *state_);
      if (encoding != "none") resp["obs"] = observation_json(state_->world, encoding);
    } else if (op == "observe") {
      if (!state_) throw ProtocolError{"no_episode", "reset first"};
      describe(resp, *state_);
      resp["obs"] = observation_json(state_->world, encoding == "none" ? "full" : encoding);
    } else {
      throw ProtocolError{"unknown_op", "unknown op '" + op + "'"};
    }
  } catch (const ProtocolError& e) {
    return error_line(resp, e.code, e.message);
  } catch (const std::exception& e) {
    return error_line(resp, "bad_request", e.what());
  }
  return resp.dump();
}

void serve_env(std::istream& in, std::ostream& out) {
  EnvSession session;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << session.handle(line) << '\n';
    out.flush();
  }
}

}  // namespace powder
