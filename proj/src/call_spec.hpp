#pragma once

#include "bfix/errors.hpp"
#include "csv.hpp"

#include <string>
#include <vector>

namespace bfix::detail {

/// "name(arg1, arg2)" split into name and raw argument strings; "name" alone has no arguments.
struct CallSpec {
  std::string name;
  std::vector<std::string> args;
};

inline CallSpec parse_call(const std::string& text) {
  CallSpec call;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    call.name = trim(text);
    return call;
  }
  if (text.back() != ')') throw ConfigError("malformed call '" + text + "': missing ')'");
  call.name = trim(text.substr(0, open));
  const std::string inner = text.substr(open + 1, text.size() - open - 2);
  if (trim(inner).empty()) return call;
  std::size_t start = 0;
  while (true) {
    const auto comma = inner.find(',', start);
    call.args.push_back(trim(inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return call;
}

/// Decimal or "p/q".
inline double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return parse_real(trim(text));
    return parse_real(trim(text.substr(0, slash))) / parse_real(trim(text.substr(slash + 1)));
  } catch (const ParameterError&) {
    throw ConfigError("not a number: '" + text + "'");
  }
}

inline std::vector<double> numeric_args(const CallSpec& call, std::size_t expected) {
  if (expected != static_cast<std::size_t>(-1) && call.args.size() != expected)
    throw ConfigError("'" + call.name + "' takes " + std::to_string(expected) + " argument(s), got " +
                      std::to_string(call.args.size()));
  std::vector<double> out;
  for (const auto& a : call.args) out.push_back(parse_number(a));
  return out;
}

}  // namespace bfix::detail
