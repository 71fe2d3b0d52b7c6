#pragma once

#include <stdexcept>
#include <string>

namespace nanoshuttle {

/// Malformed user input: config files, trace CSVs, inconsistent sweep flags.
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query falls outside the energy range a StateTable was enumerated for.
class CutoffError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Not enough detected peaks to form a spacing statistic.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nanoshuttle
