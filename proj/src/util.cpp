#include "wrw/util.hpp"

#include <ctime>

namespace wrw {

std::string timestamp_line(const std::string& what) {
  std::time_t t = std::time(nullptr);
  char buf[64];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return "# weylwalk " + what + " generated " + buf + "\n";
}

}  // namespace wrw
