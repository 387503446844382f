#ifndef SAMSON_ERRORS_HPP
#define SAMSON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace samson {

// Broad failure categories, used by the CLI to pick exit codes.
enum class ErrorClass { Config, Io, Data, Divergence };

class Error : public std::runtime_error {
public:
  Error(ErrorClass cls, std::string msg) : std::runtime_error(std::move(msg)), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

private:
  ErrorClass cls_;
};

#define SAMSON_DEFINE_ERROR(Name, Class)                                                           \
  class Name : public Error {                                                                      \
  public:                                                                                          \
    explicit Name(std::string msg) : Error(ErrorClass::Class, std::move(msg)) {}                   \
  }

SAMSON_DEFINE_ERROR(MalformedFile, Data);
SAMSON_DEFINE_ERROR(DimensionMismatch, Data);
SAMSON_DEFINE_ERROR(NonFiniteData, Data);
SAMSON_DEFINE_ERROR(IoFailure, Io);
SAMSON_DEFINE_ERROR(UnknownBand, Data);
SAMSON_DEFINE_ERROR(MissingCalibration, Config);
SAMSON_DEFINE_ERROR(EmptyHistogram, Data);
SAMSON_DEFINE_ERROR(PlacementFailure, Data);
SAMSON_DEFINE_ERROR(ShapeMismatch, Data);
SAMSON_DEFINE_ERROR(InvalidLabel, Data);
SAMSON_DEFINE_ERROR(StateError, Data);
SAMSON_DEFINE_ERROR(UninitializedStats, Data);
SAMSON_DEFINE_ERROR(EmptyDataset, Data);
SAMSON_DEFINE_ERROR(DivergenceDetected, Divergence);
SAMSON_DEFINE_ERROR(TooFewSamples, Data);
SAMSON_DEFINE_ERROR(LengthMismatch, Data);
SAMSON_DEFINE_ERROR(InvalidClass, Data);
SAMSON_DEFINE_ERROR(EmptyMatrix, Data);
SAMSON_DEFINE_ERROR(ConfigError, Config);

#undef SAMSON_DEFINE_ERROR

} // namespace samson

#endif
