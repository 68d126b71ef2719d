#include "prodist/numeric.hpp"

#include <charconv>
#include <system_error>

namespace prodist {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

}  // namespace prodist
