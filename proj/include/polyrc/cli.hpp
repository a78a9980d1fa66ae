#ifndef POLYRC_CLI_HPP_
#define POLYRC_CLI_HPP_

#include <iosfwd>
#include <stdexcept>

namespace polyrc {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

// Bad configuration or input data; maps to kExitValidation.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Subcommands: ingest, stats, run, score, train, synth.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polyrc

#endif  // POLYRC_CLI_HPP_
