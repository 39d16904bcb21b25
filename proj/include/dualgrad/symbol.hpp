// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace dualgrad {

// Interned identifier. Id 0 is the empty name.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);
  Symbol(const char* name) : Symbol(std::string_view(name)) {}

  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }
  const std::string& str() const;

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }

  static std::uint32_t table_size();

 private:
  std::uint32_t id_ = 0;
};

}  // namespace dualgrad

template <>
struct std::hash<dualgrad::Symbol> {
  std::size_t operator()(dualgrad::Symbol s) const noexcept { return s.id(); }
};
