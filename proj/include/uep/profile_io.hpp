#pragma once

// Plain-text profile files.
//
//   # comment
//   [meta]
//   key = value
//   [global]
//   lambda = 2:0.213 3:0.0927
//   [class 1]
//   lambda = 4:0.00197 18:0.57263
//   nodes = 4:4 18:258
//   rho = 2:0.35 3:0.35 4:0.3
//   [checktype 3,4,2]
//   fraction = 0.125
//   [provenance]
//   key = value
//
// Class numbers in files are 1-based. Every section and key is optional.
// Blank lines and lines starting with '#' are ignored. `write_profile`
// produces the canonical form (sections in the order above, reals printed
// in their shortest round-tripping form); parsing canonical text and writing it again
// reproduces it byte for byte.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uep/ensemble.hpp"

namespace uep {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ClassSection {
  EdgeDistribution lambda;
  std::map<int, int> nodes;
  SocketProfile rho;
};

struct ProfileDocument {
  std::vector<std::pair<std::string, std::string>> meta;
  std::optional<EdgeDistribution> global_lambda;
  std::map<int, ClassSection> classes;  // 0-based class index
  TypeDistribution check_types;
  std::vector<std::pair<std::string, std::string>> provenance;

  std::optional<std::string> meta_value(const std::string& key) const;
  void set_meta(const std::string& key, const std::string& value);
};

ProfileDocument parse_profile(std::istream& in);
ProfileDocument parse_profile_string(const std::string& text);
ProfileDocument read_profile_file(const std::string& path);

void write_profile(std::ostream& out, const ProfileDocument& doc);
std::string profile_to_string(const ProfileDocument& doc);
void write_profile_file(const std::string& path, const ProfileDocument& doc);

/// Shortest round-trippable text for a double (at most 17 significant digits).
std::string format_real(double v);

}  // namespace uep
