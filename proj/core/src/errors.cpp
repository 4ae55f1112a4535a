#include "semcloud/errors.hpp"

namespace semcloud {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::Structure: return "StructureError";
    case ErrorCode::Cycle: return "CycleError";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::MissingTask: return "MissingTask";
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::Safety: return "SafetyError";
    case ErrorCode::Recursion: return "RecursionError";
    case ErrorCode::MissingExternal: return "MissingExternal";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::Arithmetic: return "ArithmeticError";
    case ErrorCode::EmptyAggregate: return "EmptyAggregate";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroMeanTruth: return "ZeroMeanTruth";
    case ErrorCode::EmptyModel: return "EmptyModel";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::NonFiniteModel: return "NonFiniteModel";
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::MappingGap: return "MappingGap";
    case ErrorCode::MissingReference: return "MissingReference";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::InsufficientResources: return "InsufficientResources";
    case ErrorCode::SimulatedOutOfMemory: return "SimulatedOutOfMemory";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Io: return "IoError";
  }
  return "Error";
}

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : Error(ErrorCode::Syntax,
            message + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line),
      column_(column) {}

}  // namespace semcloud
