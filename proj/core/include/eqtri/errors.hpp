#pragma once

#include <stdexcept>
#include <string>

namespace eqtri {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// manifold
class NotOnManifold : public Error {
 public:
  using Error::Error;
};
class NearSingularGram : public Error {
 public:
  using Error::Error;
};
/// Z = X + xi left the open set where the retraction is defined. Recoverable:
/// callers shrink the step and retry.
class RetractionDomain : public Error {
 public:
  using Error::Error;
};

// objective / trilateration
class SingularGeometry : public Error {
 public:
  using Error::Error;
};

// bounds
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};
class SingularFim : public Error {
 public:
  using Error::Error;
};
class SingularProjectedFim : public Error {
 public:
  using Error::Error;
};
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// signal
class NotCoprime : public Error {
 public:
  using Error::Error;
};
class FrameOverflow : public Error {
 public:
  using Error::Error;
};
class NoPeak : public Error {
 public:
  using Error::Error;
};

// configuration
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace eqtri
