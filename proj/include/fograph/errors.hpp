#ifndef FOGRAPH_ERRORS_HPP
#define FOGRAPH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fograph {

enum class Errc {
  UnknownNode,
  DuplicateNode,
  DuplicateRegistration,
  ConstraintViolation,
  NotFound,
  NoMeasurements,
  UnknownRegistration,
  ShapeUnsupported,
  NegativeRt,
  InvalidPolicy,
  NoEligibleNode,
  Unreachable,
  SchemaError,
  DisconnectedGraph,
  InvalidInterval,
  UnknownSensor,
  EmptySeries,
  InvalidDescriptor,
  IoError,
};

const char* errc_name(Errc code);

/// Exception carrying a typed error code; all library operations report
/// failures through this.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace fograph

#endif
