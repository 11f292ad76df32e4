#include "periscope/scene.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "periscope/field.hpp"

namespace periscope {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& known, bool strict, json& extras, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::schema_error, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (known.count(key)) continue;
    if (strict) throw Error(ErrorCode::schema_error, "unknown field '" + key + "' in " + where);
    extras[key] = value;
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::schema_error, std::string("missing field '") + key + "' in " + where);
  return *it;
}

json with_extras(json j, const json& extras) {
  for (const auto& [key, value] : extras.items()) j[key] = value;
  return j;
}

const std::set<std::string> kDocumentKeys{"version", "dimension", "systems", "metadata"};
const std::set<std::string> kSystemKeys{"name",        "expected_reflections", "path_constants", "entry_domain",
                                        "exit_domain", "patches",              "metadata"};
const std::set<std::string> kPatchKeys{"id", "domain", "height"};

MirrorPatch patch_from_json(const json& j, const std::string& where) {
  return MirrorPatch(Domain::from_json(require(j, "domain", where)), ScalarField::from_json(require(j, "height", where)),
                     require(j, "id", where).get<std::string>());
}

}  // namespace

json system_to_json(const MirrorSystem& system) {
  json patches = json::array();
  for (const auto& p : system.patches) {
    patches.push_back({{"id", p.id()}, {"domain", p.base_domain().to_json()}, {"height", p.height().to_json()}});
  }
  json cs = json::array();
  for (double c : system.path_constants) cs.push_back(exact_decimal(c));
  return {{"expected_reflections", system.expected_reflections},
          {"path_constants", cs},
          {"entry_domain", system.entry_domain.to_json()},
          {"exit_domain", system.exit_domain.to_json()},
          {"patches", patches},
          {"metadata", system.metadata}};
}

MirrorSystem system_from_json(const json& j) {
  try {
    MirrorSystem s;
    s.expected_reflections = require(j, "expected_reflections", "system").get<int>();
    for (const auto& c : require(j, "path_constants", "system")) s.path_constants.push_back(parse_decimal(c));
    s.entry_domain = Domain::from_json(require(j, "entry_domain", "system"));
    s.exit_domain = Domain::from_json(require(j, "exit_domain", "system"));
    for (const auto& p : require(j, "patches", "system")) s.patches.push_back(patch_from_json(p, "patch"));
    if (j.contains("metadata")) s.metadata = j.at("metadata");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_error, e.what());
  }
}

json SceneDocument::to_json() const {
  json systems_json = json::array();
  for (const auto& s : systems) {
    json sj = system_to_json(s.system);
    sj["name"] = s.name;
    for (std::size_t i = 0; i < s.patch_extras.size() && i < sj["patches"].size(); ++i)
      sj["patches"][i] = with_extras(sj["patches"][i], s.patch_extras[i]);
    systems_json.push_back(with_extras(sj, s.extras));
  }
  return with_extras({{"version", version}, {"dimension", dimension}, {"systems", systems_json}, {"metadata", metadata}},
                     extras);
}

std::string SceneDocument::serialize() const { return to_json().dump(2) + "\n"; }

SceneDocument SceneDocument::from_json(const json& j, bool strict) {
  SceneDocument doc;
  check_keys(j, kDocumentKeys, strict, doc.extras, "scene");
  try {
    doc.version = require(j, "version", "scene").get<std::string>();
    if (doc.version != kSceneVersion) {
      throw Error(ErrorCode::schema_error,
                  "unsupported scene version '" + doc.version + "' (expected " + kSceneVersion + ")");
    }
    doc.dimension = require(j, "dimension", "scene").get<int>();
    if (doc.dimension != 1 && doc.dimension != 2) throw Error(ErrorCode::schema_error, "dimension must be 1 or 2");
    if (j.contains("metadata")) doc.metadata = j.at("metadata");
    int index = 0;
    for (const auto& sj : require(j, "systems", "scene")) {
      const std::string where = "system " + std::to_string(index++);
      SceneSystem s;
      check_keys(sj, kSystemKeys, strict, s.extras, where);
      s.name = sj.value("name", "");
      for (const auto& pj : require(sj, "patches", where)) {
        json extra = json::object();
        check_keys(pj, kPatchKeys, strict, extra, where + " patch");
        s.patch_extras.push_back(extra);
      }
      s.system = system_from_json(sj);
      if (s.system.dimension() != doc.dimension) {
        throw Error(ErrorCode::schema_error, where + " has dimension " + std::to_string(s.system.dimension()));
      }
      bool any_extra = false;
      for (const auto& e : s.patch_extras) any_extra = any_extra || !e.empty();
      if (!any_extra) s.patch_extras.clear();
      doc.systems.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_error, e.what());
  }
  return doc;
}

SceneDocument SceneDocument::parse(const std::string& text, bool strict) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
  return from_json(j, strict);
}

SceneDocument scene_of(const MirrorSystem& system, const std::string& name) {
  SceneDocument doc;
  doc.dimension = system.dimension();
  doc.systems.push_back({name, system, json::object(), {}});
  return doc;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

SceneDocument read_scene(const std::string& path, bool strict) { return SceneDocument::parse(read_text(path), strict); }

}  // namespace periscope
