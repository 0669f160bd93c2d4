#ifndef DRSDDP_COMMON_HPP_
#define DRSDDP_COMMON_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace drsddp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Default numerical tolerances; LP tolerances are a decade tighter than the
// MIP gap so cut intercepts derived from duals stay reliable.
inline constexpr double kTolFeas = 1e-7;
inline constexpr double kTolGap = 1e-7;
inline constexpr double kTolMip = 1e-4;
inline constexpr double kTolPivot = 1e-9;

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalFailure : SolverError { using SolverError::SolverError; };
struct DimensionMismatch : SolverError { using SolverError::SolverError; };
struct ModelError : SolverError { using SolverError::SolverError; };
struct TooLarge : SolverError { using SolverError::SolverError; };
struct BadBound : SolverError { using SolverError::SolverError; };
struct NodeLimit : SolverError { using SolverError::SolverError; };
struct UnboundedInteger : SolverError { using SolverError::SolverError; };
struct DualInfeasible : SolverError { using SolverError::SolverError; };
struct NegativeRadius : SolverError { using SolverError::SolverError; };
struct BadGrid : SolverError { using SolverError::SolverError; };
struct DegenerateGeometry : SolverError { using SolverError::SolverError; };
struct EmptyDisjunct : SolverError { using SolverError::SolverError; };
struct TooManyDisjuncts : SolverError { using SolverError::SolverError; };

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace drsddp

#endif  // DRSDDP_COMMON_HPP_
