#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mkdual {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleMarginals : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class ZeroMassCell : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

class EmptyAnchorSet : public Error {
 public:
  using Error::Error;
};

class MissingRepresentative : public Error {
 public:
  using Error::Error;
};

class InfeasibleWitness : public Error {
 public:
  using Error::Error;
};

class NotMonotone : public Error {
 public:
  using Error::Error;
};

class MarginalMismatch : public Error {
 public:
  using Error::Error;
};

class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

/// The cost moves faster in x than the declared bound allows at (x, z).
class LipschitzBoundViolated : public Error {
 public:
  LipschitzBoundViolated(std::size_t x, std::size_t z, const std::string& what)
      : Error(what), x_(x), z_(z) {}
  std::pair<std::size_t, std::size_t> pair() const { return {x_, z_}; }

 private:
  std::size_t x_, z_;
};

/// nu differs from the push-forward of mu. The defect vector nu - mu∘phi^{-1}
/// is carried as doubles (exact values are in the message in rational mode).
class NotMeasurePreserving : public Error {
 public:
  NotMeasurePreserving(std::vector<double> defect, const std::string& what)
      : Error(what), defect_(std::move(defect)) {}
  const std::vector<double>& defect() const { return defect_; }

 private:
  std::vector<double> defect_;
};

/// Instance file could not be parsed; carries a JSON-pointer-ish field path.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Instance parsed but violates an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mkdual
