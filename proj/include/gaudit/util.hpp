#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gaudit::util {

// Fixed numeric formatting used by every exported table: 12 significant
// digits, '.' separator. Exports must be byte-deterministic, so all float
// printing funnels through here.
std::string format_g12(double v);

std::string sha256_hex(std::string_view data);

// FNV-1a, used where a fast non-cryptographic mix is enough (seed derivation).
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string trim(std::string_view s);
bool has_outer_whitespace(std::string_view s);

std::string to_lower(std::string_view s);

// Replaces characters that are awkward in file names ('/', ':', spaces, ...).
std::string sanitize_path_component(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// RFC-4180 style quoting, applied only when the field needs it.
std::string csv_field(std::string_view s);
std::string csv_row(const std::vector<std::string>& fields);

// Current wall-clock time as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601_utc_now();

}  // namespace gaudit::util
