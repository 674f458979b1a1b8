#pragma once

#include <stdexcept>
#include <string>

namespace chartbench {

enum class Errc {
  // table / csv
  RaggedRow,
  ForbiddenCharacter,
  MalformedCsv,
  // metrics
  LengthMismatch,
  // losses
  DimensionMismatch,
  LambdaOutOfRange,
  BadLogits,
  // chart building / rendering
  NonNumericCell,
  PieShapeError,
  TooFewValues,
  CanvasTooSmall,
  // gateway
  MissingPlaceholder,
  UnparseableResponse,
  AuthError,
  RateLimited,
  Timeout,
  TransportError,
  ServerError,
  MalformedServerReply,
  EmptyCompletion,
  MissingEndpoint,
  // dataset / harness
  MissingDirectory,
  IoError,
  MalformedJson,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chartbench
