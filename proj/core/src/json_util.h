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
#ifndef CACP_SRC_JSON_UTIL_H_
#define CACP_SRC_JSON_UTIL_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "cacp/error.h"
#include "cacp/geometry.h"
#include "json.hpp"

namespace cacp::internal {

using Json = nlohmann::json;

inline std::string Join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

// Rejects keys outside `allowed`, naming the first offender with its path.
inline void RequireKnownKeys(const Json& obj, const std::string& where,
                             std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ConfigError((where.empty() ? std::string("document") : where) +
                      " must be a JSON object");
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError("unknown key \"" + Join(where, item.key()) + "\"");
  }
}

inline double GetNumber(const Json& obj, std::string_view key,
                        const std::string& where, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) {
    throw ConfigError("\"" + Join(where, key) + "\" must be a number");
  }
  return it->get<double>();
}

inline bool GetBool(const Json& obj, std::string_view key,
                    const std::string& where, bool fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    throw ConfigError("\"" + Join(where, key) + "\" must be a boolean");
  }
  return it->get<bool>();
}

inline int GetInt(const Json& obj, std::string_view key,
                  const std::string& where, int fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) {
    throw ConfigError("\"" + Join(where, key) + "\" must be an integer");
  }
  return it->get<int>();
}

inline Vec2 GetVec2(const Json& obj, std::string_view key,
                    const std::string& where, Vec2 fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number()) {
    throw ConfigError("\"" + Join(where, key) + "\" must be [x, y]");
  }
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

}  // namespace cacp::internal

#endif  // CACP_SRC_JSON_UTIL_H_
