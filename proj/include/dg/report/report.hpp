#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dg/kernel/verdict.hpp"

namespace dg {

// Flat, ordered "key: value" lines under a schema line. Keys carry no
// whitespace or ':'; values are single lines and may be empty.
class Report {
 public:
  static constexpr std::string_view kSchema = "dg-report/1";

  void add(std::string key, std::string value);
  void add(std::string key, std::uint64_t value);
  void add_flag(std::string key, bool value) { add(std::move(key), std::string(value ? "yes" : "no")); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::optional<std::string> get(std::string_view key) const;

  std::string render() const;
  // Throws ParseError.
  static Report parse(std::string_view text);

  friend bool operator==(const Report&, const Report&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// verdict, counterexample / reason / budget, then stats.*.
void add_verdict(Report& r, const Verdict& v);

}  // namespace dg
