#include "reloc/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "reloc/error.hpp"

namespace reloc {

std::string format_real(double x, int significant) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, significant);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format real");
  return std::string(buf.data(), ptr);
}

std::string join_reals(std::span<const double> xs, char sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_real(xs[i]);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(start, end - start);
    const auto b = token.find_first_not_of(" \t");
    const auto e = token.find_last_not_of(" \t");
    token = b == std::string::npos ? std::string() : token.substr(b, e - b + 1);
    if (token.empty()) throw Error(ErrorCode::ParseError, "empty entry in list '" + text + "'");
    double value = 0.0;
    const char* first = token.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw Error(ErrorCode::ParseError, "bad number '" + token + "'");
    }
    out.push_back(value);
    start = end + 1;
  }
  return out;
}

}  // namespace reloc
