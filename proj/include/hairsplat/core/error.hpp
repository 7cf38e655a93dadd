#pragma once

#include <stdexcept>
#include <string>

namespace hairsplat {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_input(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

inline void require_state(bool cond, const std::string& msg) {
  if (!cond) throw InvalidState(msg);
}

}  // namespace hairsplat
