#pragma once

#include <stdexcept>
#include <string>

namespace ips {

/// Malformed user input: unknown vertex ids, bad config files, out-of-range
/// arguments. CLI maps this to exit code 2.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A model broke its declared contract: rate above the declared bound,
/// negative rate, access outside the local closure, or an accepted jump
/// leaving the declared state space.
struct model_contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A trajectory has two events sharing a timestamp.
struct properness_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact computation would exceed an explicit size cap.
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation requires a model class the given model does not belong to
/// (e.g. exact transient laws for non-Markov rates).
struct unsupported_model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ensemble too small or too degenerate for the requested test.
struct insufficient_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite value where a finite one is required.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ips
