#include "uep/profile_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace uep {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) throw ParseError(line, "bad number '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, int line) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size()) throw ParseError(line, "bad integer '" + tok + "'");
  return static_cast<int>(v);
}

template <typename V, typename F>
std::map<int, V> parse_pairs(const std::string& value, int line, F&& conv) {
  std::map<int, V> out;
  std::istringstream is(value);
  std::string tok;
  while (is >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ParseError(line, "expected key:value, got '" + tok + "'");
    const int key = parse_int(tok.substr(0, colon), line);
    if (out.count(key)) throw ParseError(line, "duplicate key " + std::to_string(key));
    out[key] = conv(tok.substr(colon + 1), line);
  }
  return out;
}

DegreeVector parse_dvec(const std::string& s, int line) {
  DegreeVector d;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) d.push_back(parse_int(trim(tok), line));
  if (d.empty()) throw ParseError(line, "empty d-vector");
  return d;
}

std::string join_pairs(const std::map<int, double>& m) {
  std::string out;
  for (const auto& [k, v] : m) {
    if (!out.empty()) out += ' ';
    out += std::to_string(k) + ':' + format_real(v);
  }
  return out;
}

std::string join_pairs(const std::map<int, int>& m) {
  std::string out;
  for (const auto& [k, v] : m) {
    if (!out.empty()) out += ' ';
    out += std::to_string(k) + ':' + std::to_string(v);
  }
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::optional<std::string> ProfileDocument::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void ProfileDocument::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta.emplace_back(key, value);
}

ProfileDocument parse_profile(std::istream& in) {
  ProfileDocument doc;
  enum class Sec { None, Meta, Global, Class, Check, Provenance } sec = Sec::None;
  int cls = -1;
  DegreeVector dvec;
  std::size_t arity = 0;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      const auto body = trim(s.substr(1, s.size() - 2));
      if (body == "meta") {
        sec = Sec::Meta;
      } else if (body == "global") {
        sec = Sec::Global;
      } else if (body == "provenance") {
        sec = Sec::Provenance;
      } else if (body.rfind("class ", 0) == 0) {
        sec = Sec::Class;
        cls = parse_int(trim(body.substr(6)), line) - 1;
        if (cls < 0) throw ParseError(line, "class numbers start at 1");
        doc.classes[cls];
      } else if (body.rfind("checktype ", 0) == 0) {
        sec = Sec::Check;
        dvec = parse_dvec(trim(body.substr(10)), line);
        if (arity == 0) arity = dvec.size();
        if (dvec.size() != arity) throw ParseError(line, "check types disagree on the number of classes");
        if (doc.check_types.count(dvec)) throw ParseError(line, "duplicate check type");
        doc.check_types[dvec] = 0.0;
      } else {
        throw ParseError(line, "unknown section '" + body + "'");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const auto key = trim(s.substr(0, eq));
    const auto value = trim(s.substr(eq + 1));
    switch (sec) {
      case Sec::None:
        throw ParseError(line, "key outside of a section");
      case Sec::Meta:
        doc.meta.emplace_back(key, value);
        break;
      case Sec::Provenance:
        doc.provenance.emplace_back(key, value);
        break;
      case Sec::Global:
        if (key != "lambda") throw ParseError(line, "unknown key '" + key + "' in [global]");
        doc.global_lambda = parse_pairs<double>(value, line, parse_real);
        break;
      case Sec::Class: {
        auto& c = doc.classes[cls];
        if (key == "lambda") {
          c.lambda = parse_pairs<double>(value, line, parse_real);
        } else if (key == "rho") {
          c.rho = parse_pairs<double>(value, line, parse_real);
        } else if (key == "nodes") {
          c.nodes = parse_pairs<int>(value, line, parse_int);
        } else {
          throw ParseError(line, "unknown key '" + key + "' in [class]");
        }
        break;
      }
      case Sec::Check:
        if (key != "fraction") throw ParseError(line, "unknown key '" + key + "' in [checktype]");
        doc.check_types[dvec] = parse_real(value, line);
        break;
    }
  }
  return doc;
}

ProfileDocument parse_profile_string(const std::string& text) {
  std::istringstream is(text);
  return parse_profile(is);
}

ProfileDocument read_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile file '" + path + "'");
  return parse_profile(in);
}

void write_profile(std::ostream& out, const ProfileDocument& doc) {
  if (!doc.meta.empty()) {
    out << "[meta]\n";
    for (const auto& [k, v] : doc.meta) out << k << " = " << v << '\n';
  }
  if (doc.global_lambda) {
    out << "[global]\nlambda = " << join_pairs(*doc.global_lambda) << '\n';
  }
  for (const auto& [j, c] : doc.classes) {
    out << "[class " << j + 1 << "]\n";
    if (!c.lambda.empty()) out << "lambda = " << join_pairs(c.lambda) << '\n';
    if (!c.nodes.empty()) out << "nodes = " << join_pairs(c.nodes) << '\n';
    if (!c.rho.empty()) out << "rho = " << join_pairs(c.rho) << '\n';
  }
  for (const auto& [d, f] : doc.check_types) {
    out << "[checktype ";
    for (std::size_t i = 0; i < d.size(); ++i) out << (i ? "," : "") << d[i];
    out << "]\nfraction = " << format_real(f) << '\n';
  }
  if (!doc.provenance.empty()) {
    out << "[provenance]\n";
    for (const auto& [k, v] : doc.provenance) out << k << " = " << v << '\n';
  }
}

std::string profile_to_string(const ProfileDocument& doc) {
  std::ostringstream os;
  write_profile(os, doc);
  return os.str();
}

void write_profile_file(const std::string& path, const ProfileDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile file '" + path + "'");
  write_profile(out, doc);
}

}  // namespace uep
