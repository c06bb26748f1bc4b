#pragma once

#include <stdexcept>
#include <string>

namespace mcfs {

// Validation failures on input data.
struct MalformedProfile : std::runtime_error { using std::runtime_error::runtime_error; };
struct EmptySlice : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotTwoConvex : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotConvex : std::runtime_error { using std::runtime_error::runtime_error; };
struct NonpositiveEpsilon : std::runtime_error { using std::runtime_error::runtime_error; };
struct DomainTooSmall : std::runtime_error { using std::runtime_error::runtime_error; };
struct BadConfig : std::runtime_error { using std::runtime_error::runtime_error; };

// Stepping contract violations.
struct CflViolation : std::runtime_error { using std::runtime_error::runtime_error; };
struct NegativeRadius : std::runtime_error { using std::runtime_error::runtime_error; };
struct FlowStalled : std::runtime_error { using std::runtime_error::runtime_error; };

// Surgery failures.
struct NoTrigger : std::runtime_error { using std::runtime_error::runtime_error; };
struct WindowOutOfRange : std::runtime_error { using std::runtime_error::runtime_error; };
struct CapCurvatureExceeded : std::runtime_error { using std::runtime_error::runtime_error; };
struct SurgeryCapExceeded : std::runtime_error { using std::runtime_error::runtime_error; };
struct SurgeryInfeasible : std::runtime_error { using std::runtime_error::runtime_error; };

// Track analytics.
struct EmptyTrack : std::runtime_error { using std::runtime_error::runtime_error; };
struct TimeMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotDisjoint : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotReached : std::runtime_error { using std::runtime_error::runtime_error; };

struct IoError : std::runtime_error { using std::runtime_error::runtime_error; };

}  // namespace mcfs
