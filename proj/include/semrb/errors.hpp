#pragma once

#include <stdexcept>
#include <string>

namespace semrb {

/// Invalid user configuration (mesh, boundary data, flags).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A per-element block (C or D-hat) could not be factored.
class CondensationError : public std::runtime_error {
 public:
  CondensationError(int element, const std::string& what)
      : std::runtime_error("element " + std::to_string(element) + ": " + what),
        element_(element) {}

  int element() const { return element_; }

 private:
  int element_;
};

/// A globally coupled or reduced system could not be solved.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Artifact built for a different discretization or format version.
class IncompatibleArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Format version differs from the one this build writes.
class VersionMismatch : public IncompatibleArtifact {
 public:
  using IncompatibleArtifact::IncompatibleArtifact;
};

/// Discretization fingerprint or payload kind differs from the expected one.
class FingerprintMismatch : public IncompatibleArtifact {
 public:
  using IncompatibleArtifact::IncompatibleArtifact;
};

/// Artifact truncated or with a bad magic string.
class CorruptArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semrb
