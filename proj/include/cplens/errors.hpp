#pragma once

#include <stdexcept>
#include <string>

namespace cplens {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// algebra
struct DegenerateElimination : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };

// lens models
struct DuplicatePosition : Error { using Error::Error; };
struct NonpositiveMass : Error { using Error::Error; };
struct NonpositiveParameter : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct PoleEvaluation : Error { using Error::Error; };
struct SymmetryViolation : Error { using Error::Error; };
struct NoPotentialForm : Error { using Error::Error; };
struct PotentialSingularity : Error { using Error::Error; };

// solver / invariants
struct DegeneratePoint : Error { using Error::Error; };
struct NotRealImage : Error { using Error::Error; };
struct CenteredSource : Error { using Error::Error; };

// caustic scans
struct EmptyWindow : Error { using Error::Error; };

// CLI / config files
struct ConfigError : Error { using Error::Error; };

}  // namespace cplens
