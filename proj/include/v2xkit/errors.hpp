#pragma once

#include <stdexcept>
#include <string>

namespace v2xkit {

// Base class for every condition the toolkit reports. Callers that do not
// care about the precise failure can catch this one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define V2XKIT_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what = #Name) : Error(what) {} \
  }

V2XKIT_DEFINE_ERROR(DepthNearZero);
V2XKIT_DEFINE_ERROR(DegenerateFov);
V2XKIT_DEFINE_ERROR(OutOfRange);
V2XKIT_DEFINE_ERROR(UnknownVertex);
V2XKIT_DEFINE_ERROR(UnknownClass);
V2XKIT_DEFINE_ERROR(ShapeMismatch);
V2XKIT_DEFINE_ERROR(InvalidThresholds);
V2XKIT_DEFINE_ERROR(NeighborBiasMismatch);
V2XKIT_DEFINE_ERROR(ZeroVector);
V2XKIT_DEFINE_ERROR(MissingMatch);
V2XKIT_DEFINE_ERROR(EmptySequence);
V2XKIT_DEFINE_ERROR(NegativeComplexity);
V2XKIT_DEFINE_ERROR(EmptyScene);
V2XKIT_DEFINE_ERROR(InfeasibleSharedRatio);
V2XKIT_DEFINE_ERROR(UnknownObject);
V2XKIT_DEFINE_ERROR(OutOfExtent);
V2XKIT_DEFINE_ERROR(ParseError);
V2XKIT_DEFINE_ERROR(InvalidConfig);

#undef V2XKIT_DEFINE_ERROR

}  // namespace v2xkit
