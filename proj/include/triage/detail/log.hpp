#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <utility>

namespace triage {

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}
}  // namespace detail

// Replaces the process-wide warning sink; returns the previous one.
inline WarningHandler set_warning_handler(WarningHandler handler) {
  return std::exchange(detail::warning_handler(), std::move(handler));
}

inline void warn(const std::string& msg) {
  if (auto& h = detail::warning_handler()) h(msg);
}

}  // namespace triage
