#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxfollow {

using Vector = std::vector<double>;

// Bit path of a box from the root, most significant bit first. The depth
// is carried alongside because leading zero bits are significant.
using PathBits = std::uint64_t;

inline constexpr int kMaxDepth = 62;

// Raised for invalid arguments and malformed inputs (exit code 1 at the CLI).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The adaptive integrator gave up; `time()` is the integration time reached.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// A selection step emptied the covering: the attractor cannot be empty,
// so the continuation step that produced this was infeasible.
class AttractorLost : public std::runtime_error {
 public:
  AttractorLost(double lambda, int depth)
      : std::runtime_error("attractor lost at lambda=" + std::to_string(lambda) +
                           " (empty covering at depth " + std::to_string(depth) + ")"),
        lambda_(lambda),
        depth_(depth) {}
  double lambda() const noexcept { return lambda_; }
  int depth() const noexcept { return depth_; }

 private:
  double lambda_;
  int depth_;
};

}  // namespace boxfollow
