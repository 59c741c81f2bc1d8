// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rpoint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violated an operation's precondition (bad dimension, b <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A requested time lies beyond what a simulated path covers.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// A quantity is infinite (e.g. an exponential moment past its pole).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not reach its tolerance within the depth limit.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// The exact enumeration oracle was asked for more than its budget allows.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// An experiment configuration document is malformed or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rpoint
