#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

namespace bsig::csv {

/// Shortest round-trip decimal form, so equal values always print equal bytes.
inline std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }
inline std::string fmt(std::uint32_t v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(unsigned long long v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }
inline std::string fmt(std::string_view v) { return std::string(v); }
inline std::string fmt(const std::string& v) { return v; }
inline std::string fmt(const char* v) { return v; }

template <typename... Fields>
void row(std::ostream& out, const Fields&... fields) {
  bool first = true;
  ((out << (first ? "" : ",") << fmt(fields), first = false), ...);
  out << '\n';
}

}  // namespace bsig::csv
