#pragma once

#include <stdexcept>
#include <string>

namespace coincast {

// Exit-code mapping for the CLI: ConfigError -> 1, DataError -> 2,
// TrainError -> 3. Library code throws, tools/ translates.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class TrainError : public std::runtime_error {
 public:
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coincast
