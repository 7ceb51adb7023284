#include "dg/report/report.hpp"

#include <algorithm>
#include <cctype>

#include "dg/kernel/errors.hpp"
#include "dg/kernel/judge.hpp"
#include "dg/util/strings.hpp"

namespace dg {

namespace {

bool valid_key(std::string_view k) {
  return !k.empty() && std::none_of(k.begin(), k.end(), [](char c) {
    return c == ':' || std::isspace(static_cast<unsigned char>(c));
  });
}

}  // namespace

void Report::add(std::string key, std::string value) {
  if (!valid_key(key)) throw Error("invalid report key '" + key + "'");
  if (value.find('\n') != std::string::npos || value.find('\r') != std::string::npos) {
    throw Error("report value for '" + key + "' spans lines");
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void Report::add(std::string key, std::uint64_t value) { add(std::move(key), std::to_string(value)); }

std::optional<std::string> Report::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Report::render() const {
  std::string out = "schema: " + std::string(kSchema) + "\n";
  for (const auto& [k, v] : entries_) {
    out += k;
    out += v.empty() ? ":" : ": " + v;
    out += '\n';
  }
  return out;
}

Report Report::parse(std::string_view text) {
  auto lines = util::split_lines(text);
  if (lines.empty() || lines[0] != "schema: " + std::string(kSchema)) {
    throw ParseError("report must start with 'schema: " + std::string(kSchema) + "'", 1);
  }
  Report r;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", n + 1);
    std::string key = line.substr(0, colon);
    std::string value;
    if (colon + 1 < line.size()) {
      if (line[colon + 1] != ' ') throw ParseError("expected a space after ':'", n + 1);
      value = line.substr(colon + 2);
    }
    if (!valid_key(key)) throw ParseError("invalid key '" + key + "'", n + 1);
    r.entries_.emplace_back(std::move(key), std::move(value));
  }
  return r;
}

void add_verdict(Report& r, const Verdict& v) {
  r.add("verdict", std::string(to_string(v.outcome)));
  switch (v.outcome) {
    case Verdict::Outcome::kMisaligned: {
      const auto& c = *v.counterexample;
      r.add("counterexample", print_point(c.input) + " → " + print_point(c.output));
      r.add("counterexample.input", print_point(c.input));
      r.add("counterexample.output", print_point(c.output));
      break;
    }
    case Verdict::Outcome::kTrivialJudge:
      r.add("reason", v.reason);
      break;
    case Verdict::Outcome::kResourceExceeded:
      r.add("budget", v.budget);
      r.add("limit", v.limit);
      break;
    case Verdict::Outcome::kAligned:
      break;
  }
  for (const auto& [name, value] : v.stats) r.add("stats." + name, value);
}

}  // namespace dg
