#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace move {

// UTF-8 text, one key=value per line, order preserved. Shared by dataset
// manifests, run manifests, and train config files.
using KvList = std::vector<std::pair<std::string, std::string>>;

std::string render_kv(const KvList& entries);
KvList parse_kv(const std::string& text);

void write_kv_file(const std::string& path, const KvList& entries);
KvList read_kv_file(const std::string& path);

// Returns nullptr when the key is absent.
const std::string* find_kv(const KvList& entries, const std::string& key);

// Shortest round-trip decimal form, so equal doubles always render to equal
// bytes and parse back exactly.
std::string fmt_double(double v);
double parse_double(const std::string& s);
std::int64_t parse_int(const std::string& s);

}  // namespace move
