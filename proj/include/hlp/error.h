#ifndef HLP_ERROR_H_
#define HLP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hlp {

// Every failure the library reports carries one of these codes. The CLI maps
// them onto process exit codes (see ExitCodeFor).
enum class ErrorCode {
  kCoincidentPoints,
  kInvalidInterval,
  kSchemaError,
  kOverlapError,
  kOutOfBounds,
  kDegenerateRows,
  kRowOrder,
  kDegenerateData,
  kNonFiniteLoss,
  kArity,
  kIo,
  kFormatVersion,
  kNoCrossing,
  kEmptyBundle,
  kLayout,
  kJointLimit,
  kNoCandidates,
  kBlockedRelocation,
  kNoFeasiblePlan,
  kRowMismatch,
  kUnplaceableScene,
  kThresholdFailure,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// 0 success, 2 validation error, 3 no feasible plan, 4 I/O.
int ExitCodeFor(ErrorCode code);

}  // namespace hlp

#endif  // HLP_ERROR_H_
