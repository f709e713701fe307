#include "fograph/errors.hpp"

namespace fograph {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::DuplicateNode: return "DuplicateNode";
    case Errc::DuplicateRegistration: return "DuplicateRegistration";
    case Errc::ConstraintViolation: return "ConstraintViolation";
    case Errc::NotFound: return "NotFound";
    case Errc::NoMeasurements: return "NoMeasurements";
    case Errc::UnknownRegistration: return "UnknownRegistration";
    case Errc::ShapeUnsupported: return "ShapeUnsupported";
    case Errc::NegativeRt: return "NegativeRt";
    case Errc::InvalidPolicy: return "InvalidPolicy";
    case Errc::NoEligibleNode: return "NoEligibleNode";
    case Errc::Unreachable: return "Unreachable";
    case Errc::SchemaError: return "SchemaError";
    case Errc::DisconnectedGraph: return "DisconnectedGraph";
    case Errc::InvalidInterval: return "InvalidInterval";
    case Errc::UnknownSensor: return "UnknownSensor";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::InvalidDescriptor: return "InvalidDescriptor";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace fograph
