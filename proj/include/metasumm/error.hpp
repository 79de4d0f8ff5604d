#pragma once

#include <stdexcept>
#include <string>

namespace metasumm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: unknown lemmatizer, bad fractions, non-positive sizes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad or insufficient input data: malformed corpus lines, empty documents, missing classes.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between matrices, vectors or feature dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A remote endpoint could not be reached (timeout, refused connection).
class TransportError : public Error {
 public:
  using Error::Error;
};

/// A remote endpoint answered with a non-2xx status.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string body)
      : Error("service returned HTTP " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

/// A remote endpoint answered 2xx with a body that violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : Error("training diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// A pipeline stage was invoked before the stage producing its input.
class MissingArtifactError : public DataError {
 public:
  MissingArtifactError(const std::string& path, const std::string& stage)
      : DataError("missing artifact '" + path + "'; run `" + stage + "` first"), stage_(stage) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace metasumm
