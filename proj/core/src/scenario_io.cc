// Copyright 2026 The cacp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <fstream>
#include <sstream>
#include <string>

#include "cacp/error.h"
#include "cacp/worldsim.h"
#include "json_util.h"

namespace cacp {

using internal::GetBool;
using internal::GetInt;
using internal::GetNumber;
using internal::GetVec2;
using internal::Json;
using internal::RequireKnownKeys;

WorldScenario ParseScenario(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  RequireKnownKeys(doc, "", {"bounds", "vehicles", "objects"});
  WorldScenario w;

  if (!doc.contains("bounds")) throw ConfigError("scenario needs \"bounds\"");
  const Json& b = doc["bounds"];
  RequireKnownKeys(b, "bounds", {"min", "max"});
  if (!b.contains("min") || !b.contains("max")) {
    throw ConfigError("\"bounds\" needs \"min\" and \"max\"");
  }
  w.bounds = {GetVec2(b, "min", "bounds", {}), GetVec2(b, "max", "bounds", {})};

  if (!doc.contains("vehicles") || !doc["vehicles"].is_array()) {
    throw ConfigError("scenario needs a \"vehicles\" array");
  }
  for (size_t i = 0; i < doc["vehicles"].size(); ++i) {
    const Json& v = doc["vehicles"][i];
    const std::string where = "vehicles[" + std::to_string(i) + "]";
    RequireKnownKeys(v, where, {"id", "pose", "velocity", "ego", "exposure"});
    if (!v.contains("id") || !v.contains("pose")) {
      throw ConfigError(where + " needs \"id\" and \"pose\"");
    }
    const Json& pose = v["pose"];
    if (!pose.is_array() || pose.size() != 3 || !pose[0].is_number() ||
        !pose[1].is_number() || !pose[2].is_number()) {
      throw ConfigError("\"" + where + ".pose\" must be [x, y, yaw]");
    }
    Vehicle veh;
    veh.id = GetInt(v, "id", where, 0);
    veh.pose = {pose[0].get<double>(), pose[1].get<double>(),
                pose[2].get<double>()};
    veh.velocity = GetVec2(v, "velocity", where, {});
    veh.is_ego = GetBool(v, "ego", where, false);
    veh.exposure = GetNumber(v, "exposure", where, 1.0);
    w.vehicles.push_back(veh);
  }

  if (doc.contains("objects")) {
    if (!doc["objects"].is_array()) throw ConfigError("\"objects\" must be an array");
    for (size_t i = 0; i < doc["objects"].size(); ++i) {
      const Json& o = doc["objects"][i];
      const std::string where = "objects[" + std::to_string(i) + "]";
      RequireKnownKeys(o, where,
                       {"id", "center", "half_extents", "velocity", "occluder"});
      if (!o.contains("id") || !o.contains("center") ||
          !o.contains("half_extents")) {
        throw ConfigError(where + " needs \"id\", \"center\" and \"half_extents\"");
      }
      WorldObject obj;
      obj.id = GetInt(o, "id", where, 0);
      obj.shape = {GetVec2(o, "center", where, {}),
                   GetVec2(o, "half_extents", where, {})};
      obj.velocity = GetVec2(o, "velocity", where, {});
      obj.occluder = GetBool(o, "occluder", where, false);
      w.objects.push_back(obj);
    }
  }
  w.Validate();
  return w;
}

WorldScenario LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseScenario(ss.str());
}

std::string ScenarioToJson(const WorldScenario& world) {
  Json doc;
  doc["bounds"] = {{"min", {world.bounds.min.x, world.bounds.min.y}},
                   {"max", {world.bounds.max.x, world.bounds.max.y}}};
  doc["vehicles"] = Json::array();
  for (const Vehicle& v : world.vehicles) {
    doc["vehicles"].push_back({{"id", v.id},
                               {"pose", {v.pose.x, v.pose.y, v.pose.yaw}},
                               {"velocity", {v.velocity.x, v.velocity.y}},
                               {"ego", v.is_ego},
                               {"exposure", v.exposure}});
  }
  doc["objects"] = Json::array();
  for (const WorldObject& o : world.objects) {
    doc["objects"].push_back(
        {{"id", o.id},
         {"center", {o.shape.center.x, o.shape.center.y}},
         {"half_extents", {o.shape.half_extents.x, o.shape.half_extents.y}},
         {"velocity", {o.velocity.x, o.velocity.y}},
         {"occluder", o.occluder}});
  }
  return doc.dump(2);
}

}  // namespace cacp
