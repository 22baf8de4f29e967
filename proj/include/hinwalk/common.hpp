#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hinwalk {

using node_id = std::uint32_t;
using type_id = std::uint16_t;

inline constexpr node_id k_no_node = static_cast<node_id>(-1);

// File, format, and precondition failures. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void cat_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void cat_into(std::ostringstream& os, const T& value, const Rest&... rest) {
  os << value;
  cat_into(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  detail::cat_into(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw Error(cat(args...));
}

}  // namespace hinwalk
