#pragma once

#include <stdexcept>
#include <string>

namespace tft {

// Base for all structured errors.  `kind()` is the stable machine name used by
// the CLI when emitting {"error": {"kind": ..., "message": ...}}.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define TFT_DEFINE_ERROR(NAME)                                        \
    class NAME : public Error {                                       \
    public:                                                           \
        explicit NAME(const std::string& msg) : Error(#NAME, msg) {}  \
    }

TFT_DEFINE_ERROR(ParseError);
TFT_DEFINE_ERROR(CompositionError);
TFT_DEFINE_ERROR(PartitionError);
TFT_DEFINE_ERROR(ForestError);
TFT_DEFINE_ERROR(ElementError);
TFT_DEFINE_ERROR(NotInGroupError);
TFT_DEFINE_ERROR(IntervalError);
TFT_DEFINE_ERROR(DyadicError);
TFT_DEFINE_ERROR(NotDiffeoError);
TFT_DEFINE_ERROR(ShapeError);
TFT_DEFINE_ERROR(DegeneracyError);
TFT_DEFINE_ERROR(DegenerateBlobError);
TFT_DEFINE_ERROR(VacuumError);
TFT_DEFINE_ERROR(RefinementError);
TFT_DEFINE_ERROR(ResourceError);
TFT_DEFINE_ERROR(SupportError);
TFT_DEFINE_ERROR(SingularEigenvalueError);
TFT_DEFINE_ERROR(IrreducibleError);
TFT_DEFINE_ERROR(GramError);
TFT_DEFINE_ERROR(ParameterError);

#undef TFT_DEFINE_ERROR

} // namespace tft
