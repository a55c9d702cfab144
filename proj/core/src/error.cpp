#include "superres/error.hpp"

#include <array>
#include <charconv>

namespace superres {

std::string NumericalError::format_diagnostic(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
  if (ec != std::errc{}) return "?";
  return std::string(buf.data(), end);
}

}  // namespace superres
