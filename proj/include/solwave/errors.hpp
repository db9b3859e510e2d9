#pragma once

#include <stdexcept>
#include <string>

namespace solwave {

// Bad grids, parameters, or scenario schemas. The CLI maps this to exit code 2.
class config_error : public std::invalid_argument {
public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// A constructed object violates one of its stated admissibility conditions.
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// A solver produced NaN/Inf or otherwise blew up mid-run. Exit code 3.
class numerics_error : public std::runtime_error {
public:
  explicit numerics_error(const std::string& what) : std::runtime_error(what) {}
};

// A collision diagnostic was asked for before the pulses separated again.
class incomplete_collision_error : public std::runtime_error {
public:
  explicit incomplete_collision_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace solwave
