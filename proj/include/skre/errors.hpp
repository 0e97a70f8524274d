#pragma once

#include <stdexcept>
#include <string>

namespace skre {

// Invalid parameters or inputs supplied by the caller (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bytes on the wire that do not parse: bad magic, truncated payloads, wrong tags.
class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cryptographic precondition violated (invalid point, wrong share count, ...).
class CryptoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A session cannot complete (CLI exit code 3).
class ProtocolAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ThresholdFailure : public ProtocolAbort {
 public:
  using ProtocolAbort::ProtocolAbort;
};

}  // namespace skre
