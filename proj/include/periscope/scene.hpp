#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "periscope/mirror.hpp"

namespace periscope {

inline constexpr const char* kSceneVersion = "periscope-scene/1";

struct SceneSystem {
  std::string name;
  MirrorSystem system;
  /// Unknown keys kept by lax parsing, written back on serialization.
  nlohmann::json extras = nlohmann::json::object();
  std::vector<nlohmann::json> patch_extras;
};

struct SceneDocument {
  std::string version = kSceneVersion;
  int dimension = 2;
  std::vector<SceneSystem> systems;
  nlohmann::json metadata = nlohmann::json::object();
  nlohmann::json extras = nlohmann::json::object();

  nlohmann::json to_json() const;
  /// Two-space indented JSON with a trailing newline.
  std::string serialize() const;

  /// Strict parsing rejects unknown keys; lax parsing keeps them in `extras`.
  /// Throws parse_error (with line and column) or schema_error.
  static SceneDocument from_json(const nlohmann::json& j, bool strict = true);
  static SceneDocument parse(const std::string& text, bool strict = true);

  bool operator==(const SceneDocument& other) const { return to_json() == other.to_json(); }
};

nlohmann::json system_to_json(const MirrorSystem& system);
MirrorSystem system_from_json(const nlohmann::json& j);

SceneDocument scene_of(const MirrorSystem& system, const std::string& name = "system");

/// Throws io_error.
SceneDocument read_scene(const std::string& path, bool strict = true);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace periscope
