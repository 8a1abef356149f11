#ifndef NLB_FORMAT_HPP_
#define NLB_FORMAT_HPP_

#include <charconv>
#include <string>
#include <system_error>

namespace nlb {

// Shortest round-trip decimal representation; locale independent.
inline std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  if (result.ec != std::errc{}) return "nan";
  return std::string(buf, result.ptr);
}

}  // namespace nlb

#endif  // NLB_FORMAT_HPP_
