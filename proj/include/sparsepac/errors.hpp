#pragma once

#include <stdexcept>
#include <string>

namespace sparsepac {

// Base for everything the library throws on bad input or failed estimation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid architecture, chain settings or other configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Flat coefficient index outside [0, T).
class IndexError : public Error {
 public:
  using Error::Error;
};

// Feature vector outside [-1,1]^d or label outside {-1,+1}.
class InputError : public Error {
 public:
  using Error::Error;
};

// Bound evaluated outside the region where its formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediate quantities.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Monte-Carlo estimate inconsistent with its own error bar (e.g. a clearly
// negative KL from thermodynamic integration).
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Synthetic data generation could not satisfy its constraints.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Architecture selection had no admissible candidate.
class SelectionError : public Error {
 public:
  using Error::Error;
};

// Malformed parameter, dataset, grid or checkpoint file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsepac
