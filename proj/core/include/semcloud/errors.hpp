#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace semcloud {

enum class ErrorCode {
  // pipeline-kg
  Schema,
  Structure,
  Cycle,
  InvalidGraph,
  MissingTask,
  // datalog
  Syntax,
  Safety,
  Recursion,
  MissingExternal,
  SignatureMismatch,
  TypeMismatch,
  Arithmetic,
  EmptyAggregate,
  // learning
  DimensionMismatch,
  ZeroMeanTruth,
  EmptyModel,
  Divergence,
  InsufficientData,
  InvalidInput,
  // optimizer
  EmptySpace,
  NonFiniteModel,
  // etl
  UnreadableSource,
  MappingGap,
  MissingReference,
  CapacityExceeded,
  // simulator
  InsufficientResources,
  SimulatedOutOfMemory,
  // plumbing
  Config,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base class of every domain error thrown by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode Code>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& message) : Error(Code, message) {}
};

using SchemaError = CodedError<ErrorCode::Schema>;
using StructureError = CodedError<ErrorCode::Structure>;
using CycleError = CodedError<ErrorCode::Cycle>;
using InvalidGraph = CodedError<ErrorCode::InvalidGraph>;
using MissingTask = CodedError<ErrorCode::MissingTask>;
using SafetyError = CodedError<ErrorCode::Safety>;
using RecursionError = CodedError<ErrorCode::Recursion>;
using MissingExternal = CodedError<ErrorCode::MissingExternal>;
using SignatureMismatch = CodedError<ErrorCode::SignatureMismatch>;
using TypeMismatch = CodedError<ErrorCode::TypeMismatch>;
using ArithmeticError = CodedError<ErrorCode::Arithmetic>;
using EmptyAggregate = CodedError<ErrorCode::EmptyAggregate>;
using DimensionMismatch = CodedError<ErrorCode::DimensionMismatch>;
using ZeroMeanTruth = CodedError<ErrorCode::ZeroMeanTruth>;
using EmptyModel = CodedError<ErrorCode::EmptyModel>;
using Divergence = CodedError<ErrorCode::Divergence>;
using InsufficientData = CodedError<ErrorCode::InsufficientData>;
using InvalidInput = CodedError<ErrorCode::InvalidInput>;
using EmptySpace = CodedError<ErrorCode::EmptySpace>;
using NonFiniteModel = CodedError<ErrorCode::NonFiniteModel>;
using UnreadableSource = CodedError<ErrorCode::UnreadableSource>;
using MappingGap = CodedError<ErrorCode::MappingGap>;
using MissingReference = CodedError<ErrorCode::MissingReference>;
using CapacityExceeded = CodedError<ErrorCode::CapacityExceeded>;
using InsufficientResources = CodedError<ErrorCode::InsufficientResources>;
using SimulatedOutOfMemory = CodedError<ErrorCode::SimulatedOutOfMemory>;
using ConfigError = CodedError<ErrorCode::Config>;
using IoError = CodedError<ErrorCode::Io>;

/// Parse failure with a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace semcloud
