#pragma once

#include <stdexcept>
#include <string>

namespace bhv {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero or otherwise invalid denominator in a coefficient.
class MalformedCoefficient : public Error {
 public:
  using Error::Error;
};

/// Monomial whose slot structure is neither scalar nor vector.
class MalformedMonomial : public Error {
 public:
  using Error::Error;
};

/// Scalar combined with vector (or an unsupported product).
class ValenceMismatch : public Error {
 public:
  using Error::Error;
};

/// Differentiation would require jets beyond the supported order.
class OrderOverflow : public Error {
 public:
  using Error::Error;
};

/// A commutation or derivative needs curvature beyond contracted Ricci.
class UnsupportedCurvature : public Error {
 public:
  using Error::Error;
};

class UnknownName : public Error {
 public:
  using Error::Error;
};

/// Linear system for combination weights is singular.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Linear system for combination weights is inconsistent.
class NoCombination : public Error {
 public:
  using Error::Error;
};

class DegenerateCertificate : public Error {
 public:
  using Error::Error;
};

class ParameterRange : public Error {
 public:
  using Error::Error;
};

/// Numeric evaluation hit a root of a coefficient denominator.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Exact and floating-point routes disagree. Always fatal.
class EngineInconsistency : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace bhv
