#pragma once

#include <stdexcept>
#include <string>

namespace comal {

enum class Errc {
  EmptyMask,
  TooSmall,
  OutOfBounds,
  BadDelta,
  BadParams,
  ArcTooShort,
  EmptyEdges,
  TooManyLevels,
  EmptyTemplate,
  InsufficientOverlap,
  NoValidCombination,
  SingularHessian,
  FrameOrder,
  EmptySequence,
  PointOutsideBox,
  MissingGt,
  ObjectOutOfFrame,
  BadConfig,
  Io,
};

const char* errc_name(Errc code) noexcept;

/// Exception carrying one of the library error codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace comal
