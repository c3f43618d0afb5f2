#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace uep {

inline constexpr const char* kToolVersion = "0.3.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// Hex digest of a file's contents; throws when unreadable.
std::string file_digest(const std::string& path);

/// Record of one CLI run, written next to its outputs.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> config;  // flag -> value, in order
  std::map<std::string, std::string> inputs;                 // path -> digest
  std::map<std::string, std::string> outputs;                // path -> digest
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
  double wall_seconds = 0.0;

  void set(const std::string& key, const std::string& value);
  void add_input(const std::string& path);
  void add_output(const std::string& path);
  std::string to_json() const;
  void write(const std::string& path) const;
};

}  // namespace uep
