#include "estim/error.hpp"

#include <sstream>

namespace estim {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::EmptySample: return "EmptySample";
    case Errc::InvalidBounds: return "InvalidBounds";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::NonStationary: return "NonStationary";
    case Errc::BadDof: return "BadDof";
    case Errc::GridTooLarge: return "GridTooLarge";
    case Errc::DegenerateField: return "DegenerateField";
    case Errc::DomainError: return "DomainError";
    case Errc::InvalidMoments: return "InvalidMoments";
    case Errc::SimulatorDomainError: return "SimulatorDomainError";
    case Errc::LengthError: return "LengthError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::IoError: return "IoError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

Error Error::with_context(const std::string& context) const {
  return Error(code_, context + ": " + detail_);
}

namespace {

std::string loss_message(std::size_t epoch, double loss) {
  std::ostringstream os;
  os << "training loss became " << loss << " at epoch " << epoch;
  return os.str();
}

std::string domain_message(std::string_view name, double value, double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << name << ": value " << value << " outside open interval (" << lo << ", " << hi << ")";
  return os.str();
}

}  // namespace

NonFiniteLossError::NonFiniteLossError(std::size_t epoch, double loss)
    : Error(Errc::NonFiniteLoss, loss_message(epoch, loss)), epoch_(epoch), loss_(loss) {}

DomainError::DomainError(std::string_view transform, double value, double lo, double hi)
    : Error(Errc::DomainError, domain_message(transform, value, lo, hi)),
      value_(value),
      lo_(lo),
      hi_(hi) {}

}  // namespace estim
