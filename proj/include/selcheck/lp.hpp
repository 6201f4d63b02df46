#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace selcheck {

enum class Relation { less_equal, greater_equal, equal };

struct Constraint {
    std::vector<double> coefficients;
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
};

/// maximize objective . x  subject to the constraints and lower <= x <= upper.
///
/// Empty bound vectors mean "0" for lower bounds and "unbounded" for upper
/// bounds. Lower bounds must be finite.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower_bounds;
    std::vector<double> upper_bounds;

    std::size_t num_variables() const { return objective.size(); }
    double lower(std::size_t i) const { return lower_bounds.empty() ? 0.0 : lower_bounds[i]; }
    double upper(std::size_t i) const {
        return upper_bounds.empty() ? std::numeric_limits<double>::infinity() : upper_bounds[i];
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    std::size_t pivots = 0;
};

struct SimplexOptions {
    double pivot_tolerance = 1e-9;
    double feasibility_tolerance = 1e-6;
    /// When set, the tableau is dumped here after setup and after every pivot.
    std::ostream* trace = nullptr;
};

/// Two-phase dense tableau simplex: Dantzig pricing with a Harris ratio test, switching to
/// Bland's rule while the objective stalls. Deterministic.
/// Throws std::invalid_argument on dimension mismatch or non-finite lower bounds.
LpSolution solve_lp(const LinearProgram& problem, const SimplexOptions& options = {});

/// Solves `problem` treating constraints with index >= first_lazy as cuts that
/// are only added once violated. Gives the same optimal value as solve_lp, much
/// faster when most lazy rows are slack at the optimum.
LpSolution solve_lp_lazy(const LinearProgram& problem, std::size_t first_lazy,
                         const SimplexOptions& options = {}, std::size_t batch = 16);

/// Largest absolute constraint/bound violation of `x`.
double max_violation(const LinearProgram& problem, const std::vector<double>& x);

}  // namespace selcheck
