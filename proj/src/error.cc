#include "hlp/error.h"

namespace hlp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCoincidentPoints: return "CoincidentPoints";
    case ErrorCode::kInvalidInterval: return "InvalidInterval";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kOverlapError: return "OverlapError";
    case ErrorCode::kOutOfBounds: return "OutOfBoundsError";
    case ErrorCode::kDegenerateRows: return "DegenerateRows";
    case ErrorCode::kRowOrder: return "RowOrderError";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kArity: return "ArityError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kFormatVersion: return "FormatVersionError";
    case ErrorCode::kNoCrossing: return "NoCrossing";
    case ErrorCode::kEmptyBundle: return "EmptyBundle";
    case ErrorCode::kLayout: return "LayoutError";
    case ErrorCode::kJointLimit: return "JointLimitError";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kBlockedRelocation: return "BlockedRelocation";
    case ErrorCode::kNoFeasiblePlan: return "NoFeasiblePlan";
    case ErrorCode::kRowMismatch: return "RowMismatch";
    case ErrorCode::kUnplaceableScene: return "UnplaceableScene";
    case ErrorCode::kThresholdFailure: return "ThresholdFailure";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoFeasiblePlan:
    case ErrorCode::kNoCandidates:
      return 3;
    case ErrorCode::kIo:
    case ErrorCode::kFormatVersion:
    case ErrorCode::kLayout:
      return 4;
    default:
      return 2;
  }
}

}  // namespace hlp
