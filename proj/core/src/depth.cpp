#include "dln/depth.hpp"

#include <charconv>

#include "dln/error.hpp"

namespace dln {

Depth Depth::finite(int layers) {
  if (layers < 1) {
    throw InvalidArgument("depth must be at least 1, got " + std::to_string(layers));
  }
  return Depth(layers);
}

int Depth::layers() const {
  if (is_infinite()) throw InvalidArgument("infinite depth has no layer count");
  return layers_;
}

double Depth::alpha() const noexcept {
  return is_infinite() ? 1.0 : 1.0 - 1.0 / static_cast<double>(layers_);
}

std::string Depth::to_string() const {
  return is_infinite() ? std::string("inf") : std::to_string(layers_);
}

Depth Depth::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Infinite") return infinite();
  int value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument("cannot parse depth '" + text + "'");
  }
  return finite(value);
}

}  // namespace dln
