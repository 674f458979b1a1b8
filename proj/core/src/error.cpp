#include "chartbench/error.hpp"

namespace chartbench {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::RaggedRow: return "RaggedRow";
    case Errc::ForbiddenCharacter: return "ForbiddenCharacter";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::LambdaOutOfRange: return "LambdaOutOfRange";
    case Errc::BadLogits: return "BadLogits";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::PieShapeError: return "PieShapeError";
    case Errc::TooFewValues: return "TooFewValues";
    case Errc::CanvasTooSmall: return "CanvasTooSmall";
    case Errc::MissingPlaceholder: return "MissingPlaceholder";
    case Errc::UnparseableResponse: return "UnparseableResponse";
    case Errc::AuthError: return "AuthError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::Timeout: return "Timeout";
    case Errc::TransportError: return "TransportError";
    case Errc::ServerError: return "ServerError";
    case Errc::MalformedServerReply: return "MalformedServerReply";
    case Errc::EmptyCompletion: return "EmptyCompletion";
    case Errc::MissingEndpoint: return "MissingEndpoint";
    case Errc::MissingDirectory: return "MissingDirectory";
    case Errc::IoError: return "IoError";
    case Errc::MalformedJson: return "MalformedJson";
  }
  return "UnknownError";
}

}  // namespace chartbench
