#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "powder/base64.hpp"
#include "powder/env_protocol.hpp"
#include "powder/world_file.hpp"

using namespace powder;
using nlohmann::json;

namespace {

std::string script() {
  std::string s;
  s += R"({"op":"reset","kind":"sand_pushing","seed":9,"id":1})" "\n";
  for (int t = 0; t < 70; ++t) {
    s += R"({"op":"step","action":[45,58,"wind",7,3],"encoding":"rle"})" "\n";
  }
  s += R"({"op":"observe","encoding":"none"})" "\n";
  return s;
}

std::string run(const std::string& input) {
  std::istringstream in(input);
  std::ostringstream out;
  serve_env(in, out);
  return out.str();
}

std::string error_code(const std::string& line) {
  const json j = json::parse(line);
  return j.contains("error") ? j["error"]["code"].get<std::string>() : "";
}

}  // namespace

TEST_CASE("a request log replays to an identical transcript") {
  const std::string a = run(script());
  const std::string b = run(script());
  CHECK(a == b);
  std::istringstream lines(a);
  std::vector<std::string> out;
  for (std::string l; std::getline(lines, l);) out.push_back(l);
  REQUIRE(out.size() == 72);
  CHECK(json::parse(out[0])["id"] == 1);
  CHECK(json::parse(out[64])["done"] == true);
  CHECK(error_code(out[65]) == "episode_done");
  CHECK(error_code(out[70]) == "episode_done");
  CHECK(json::parse(out[71])["obs"]["encoding"] == "f32le_base64");
}

TEST_CASE("every error code") {
  EnvSession s;
  CHECK(error_code(s.handle("not json")) == "bad_request");
  CHECK(error_code(s.handle("[1,2]")) == "bad_request");
  CHECK(error_code(s.handle(R"({"id":4})")) == "bad_request");
  CHECK(error_code(s.handle(R"({"op":"fly"})")) == "unknown_op");
  CHECK(error_code(s.handle(R"({"op":"step","action":[0,0,"wind",0,0]})")) == "no_episode");
  CHECK(error_code(s.handle(R"({"op":"observe"})")) == "no_episode");
  CHECK(error_code(s.handle(R"({"op":"reset","kind":"juggling"})")) == "invalid_kind");
  CHECK(error_code(s.handle(R"({"op":"reset"})")) == "invalid_kind");
  CHECK(error_code(s.handle(R"({"op":"reset","kind":"destroying","seed":-1})")) == "bad_request");
  CHECK(error_code(s.handle(R"({"op":"reset","kind":"destroying","params":{"max_lines":-2}})")) == "bad_request");
  CHECK(error_code(s.handle(R"({"op":"reset","kind":"destroying","heldout":"yes"})")) == "bad_request");
  CHECK_FALSE(s.state().has_value());

  CHECK(error_code(s.handle(R"({"op":"reset","kind":"sand_pushing","seed":1,"encoding":"none"})")) == "");
  CHECK(error_code(s.handle(R"({"op":"step","action":[0,0,"sand",0,0]})")) == "rejected_action");
  CHECK(error_code(s.handle(R"({"op":"step","action":[0,0,"lava2",0,0]})")) == "rejected_action");
  CHECK(error_code(s.handle(R"({"op":"step","action":[99,0,"wind",0,0]})")) == "rejected_action");
  CHECK(error_code(s.handle(R"({"op":"step","action":[0,0,"wind",0]})")) == "bad_request");
  CHECK(error_code(s.handle(R"({"op":"step"})")) == "bad_request");
  CHECK(error_code(s.handle(R"({"op":"step","action":[0,0,"wind",0,0],"encoding":"png"})")) == "bad_request");
  CHECK(s.state()->tick == 0);

  const json ok = json::parse(s.handle(R"({"op":"step","action":{"x":1,"y":2,"element":14,"vx":7,"vy":7},"extra":true,"id":"abc"})"));
  CHECK(ok["id"] == "abc");
  CHECK(ok["tick"] == 1);
  CHECK(ok["obs"]["shape"] == json::array({64, 64, 20}));
}

TEST_CASE("observations decode to the world") {
  EnvSession s;
  s.handle(R"({"op":"reset","kind":"path_building","seed":2,"encoding":"none"})");
  const json full = json::parse(s.handle(R"({"op":"observe"})"));
  const std::vector<std::uint8_t> raw = base64_decode(full["obs"]["data"].get<std::string>());
  CHECK(raw == slot_channels(s.state()->world, 0));
  REQUIRE(raw.size() == 64 * 64 * 20 * 4);
  float first_density;
  std::memcpy(&first_density, &raw[15 * 4], 4);
  CHECK(first_density == s.state()->world.channel(0, 0, 0, 15));
  CHECK(full["digest"].is_string());

  const json rle = json::parse(s.handle(R"({"op":"observe","encoding":"rle"})"));
  std::size_t cells = 0;
  std::size_t i = 0;
  for (const auto& run : rle["obs"]["runs"]) {
    const int count = run[0].get<int>();
    const int element = run[1].get<int>();
    for (int k = 0; k < count; ++k, ++i) {
      CHECK(to_index(s.state()->world.slot(0).elem[i]) == element);
    }
    cells += static_cast<std::size_t>(count);
  }
  CHECK(cells == 4096);
}

TEST_CASE("reset options") {
  EnvSession s;
  const json held = json::parse(s.handle(R"({"op":"reset","kind":"destroying","seed":3,"heldout":true,"encoding":"none"})"));
  CHECK(held["digest"] == json::parse(EnvSession().handle(R"({"op":"reset","kind":"destroying","seed":3,"heldout":true,"encoding":"none"})"))["digest"]);
  CHECK(s.state()->episode_length == 69);
  const json quiet = json::parse(
      s.handle(R"({"op":"reset","kind":"destroying","seed":3,"params":{"max_lines":0,"max_circles":0},"encoding":"none"})"));
  CHECK(s.state()->world.slot(0).elem.size() == 4096);
  CHECK(element_histogram(s.state()->world, 0)[0] == 4096);
  CHECK(quiet["tick"] == 0);
}
