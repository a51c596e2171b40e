#pragma once

#include <stdexcept>
#include <string>

namespace chaoslab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model or experiment parameter violates its stated constraints.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Circulant embedding produced a negative eigenvalue beyond the clamp tolerance.
class EmbeddingError : public Error {
 public:
  using Error::Error;
};

/// A numerical quadrature failed to reach its tolerance.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// The quadrature grid is too coarse for the active frequencies.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A normalizer E exp(beta X_k(x)) fell below the floor tolerance.
class VanishingNormalizerError : public Error {
 public:
  using Error::Error;
};

/// A per-level joint moment generating function came too close to zero to
/// continue its logarithm.
class BranchTrackingError : public Error {
 public:
  using Error::Error;
};

/// The cumulative variance budget ran out before the requested block.
class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

/// A replica task failed; carries the replica index.
class ReplicaError : public Error {
 public:
  ReplicaError(std::size_t replica, const std::string& cause)
      : Error("replica " + std::to_string(replica) + ": " + cause), replica_(replica) {}
  std::size_t replica() const noexcept { return replica_; }

 private:
  std::size_t replica_;
};

}  // namespace chaoslab
