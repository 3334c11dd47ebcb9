#pragma once

#include <string>

namespace dln {

/// Number of weight factors in the network, or the infinite-depth limit.
class Depth {
 public:
  static Depth finite(int layers);
  static Depth infinite() { return Depth(0); }

  bool is_infinite() const noexcept { return layers_ == 0; }
  /// Throws InvalidArgument for the infinite depth.
  int layers() const;
  /// Exponent 1 - 1/N in the singular value equation (1 when infinite).
  double alpha() const noexcept;

  /// "inf" or the decimal layer count.
  std::string to_string() const;
  /// Inverse of to_string(); also accepts "infinity".
  static Depth parse(const std::string& text);

  friend bool operator==(const Depth&, const Depth&) = default;

 private:
  explicit Depth(int layers) : layers_(layers) {}
  int layers_;
};

}  // namespace dln
