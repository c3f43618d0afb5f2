#include "uep/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace uep {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& kv : config) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  config.emplace_back(key, value);
}

void RunManifest::add_input(const std::string& path) { inputs[path] = file_digest(path); }
void RunManifest::add_output(const std::string& path) { outputs[path] = file_digest(path); }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["version"] = version;
  j["seed"] = seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << to_json();
}

}  // namespace uep
