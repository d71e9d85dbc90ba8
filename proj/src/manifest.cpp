#include "move/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "move/errors.hpp"

namespace move {

std::string render_kv(const KvList& entries) {
  std::string out;
  for (const auto& [key, value] : entries) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

KvList parse_kv(const std::string& text) {
  KvList entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("manifest: line without '=': " + line, 0);
    }
    entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return entries;
}

void write_kv_file(const std::string& path, const KvList& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("manifest: cannot open for writing: " + path);
  out << render_kv(entries);
  if (!out) throw IoError("manifest: write failed: " + path);
}

KvList read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("manifest: cannot open for reading: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_kv(buf.str());
}

const std::string* find_kv(const KvList& entries, const std::string& key) {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("manifest: bad floating-point value: " + s, 0);
  }
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("manifest: bad integer value: " + s, 0);
  }
  return v;
}

}  // namespace move
