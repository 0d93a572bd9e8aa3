#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace decstore {

enum class Errc {
  ZeroInverse,
  BadPolynomial,
  BadParameter,
  DistinctnessViolation,
  IndexOutOfRange,
  LengthMismatch,
  FieldTooSmall,
  InsufficientShards,
  InconsistentShards,
  NotMds,
  NoSparseSolution,
  NotCauchy,
  OverheadMismatch,
  SchemeMismatch,
  VersionUnavailable,
  UniverseTooLarge,
  BadGeometry,
  GeometryMismatch,
  NodeFailed,
  PlacementSizeMismatch,
  InsufficientLiveShards,
  NoSuchShard,
  IoError,
  CorruptManifest,
  BadConfig,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace decstore
