// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace smokefilter {

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A distribution fit could not be produced (too few or degenerate samples).
/// Callers are expected to keep their previous threshold.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neighbor statistics are undefined for the frame; the stage passes it through.
class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frame sequence violates stream ordering.
class StreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smokefilter
