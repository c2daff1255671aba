#pragma once

#include <stdexcept>
#include <string>

namespace panocal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct FrameMismatch : Error { using Error::Error; };
struct InvalidRotation : Error { using Error::Error; };
struct BehindCamera : Error { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };
struct NoSolution : Error { using Error::Error; };
struct EpipolarViolation : Error { using Error::Error; };
struct DivergentRays : Error { using Error::Error; };
struct SingularInput : Error { using Error::Error; };

// sim
struct PackingFailure : Error { using Error::Error; };
struct InsufficientVisibility : Error { using Error::Error; };

// recon
struct NoConsensus : Error { using Error::Error; };
struct TrackingLost : Error {
  explicit TrackingLost(int frame_index)
      : Error("tracking lost between frames " + std::to_string(frame_index - 1) +
              " and " + std::to_string(frame_index)),
        frame(frame_index) {}
  int frame;
};
struct AlignmentFailure : Error { using Error::Error; };

// camloc / lidarloc
struct DegenerateInput : Error { using Error::Error; };
struct LocalizationFailure : Error { using Error::Error; };
struct NoPlanes : Error { using Error::Error; };
struct NearParallelPlanes : Error { using Error::Error; };
struct ImproperRotation : Error { using Error::Error; };
struct IcpDiverged : Error { using Error::Error; };

// calib / pipeline
struct UnknownSensor : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace panocal
