#include "comal/error.hpp"

namespace comal {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::TooSmall: return "TooSmall";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::BadDelta: return "BadDelta";
    case Errc::BadParams: return "BadParams";
    case Errc::ArcTooShort: return "ArcTooShort";
    case Errc::EmptyEdges: return "EmptyEdges";
    case Errc::TooManyLevels: return "TooManyLevels";
    case Errc::EmptyTemplate: return "EmptyTemplate";
    case Errc::InsufficientOverlap: return "InsufficientOverlap";
    case Errc::NoValidCombination: return "NoValidCombination";
    case Errc::SingularHessian: return "SingularHessian";
    case Errc::FrameOrder: return "FrameOrder";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::PointOutsideBox: return "PointOutsideBox";
    case Errc::MissingGt: return "MissingGt";
    case Errc::ObjectOutOfFrame: return "ObjectOutOfFrame";
    case Errc::BadConfig: return "BadConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace comal
