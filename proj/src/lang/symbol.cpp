// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/symbol.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace dualgrad {
namespace {

struct Table {
  std::mutex mu;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::deque<std::string> names{std::string()};
};

Table& table() {
  static Table t;
  return t;
}

}  // namespace

Symbol::Symbol(std::string_view name) {
  if (name.empty()) return;
  Table& t = table();
  std::lock_guard lock(t.mu);
  auto [it, inserted] = t.ids.try_emplace(std::string(name), static_cast<std::uint32_t>(t.names.size()));
  if (inserted) t.names.emplace_back(name);
  id_ = it->second;
}

const std::string& Symbol::str() const {
  Table& t = table();
  std::lock_guard lock(t.mu);
  return t.names[id_];
}

std::uint32_t Symbol::table_size() {
  Table& t = table();
  std::lock_guard lock(t.mu);
  return static_cast<std::uint32_t>(t.names.size());
}

}  // namespace dualgrad
