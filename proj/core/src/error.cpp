#include "condcrop/error.hpp"

namespace condcrop {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::StepOutOfRange: return "StepOutOfRange";
    case ErrorKind::EmptyProposalSet: return "EmptyProposalSet";
    case ErrorKind::InfeasibleSearchSpace: return "InfeasibleSearchSpace";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::MissingHeatmap: return "MissingHeatmap";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace condcrop
