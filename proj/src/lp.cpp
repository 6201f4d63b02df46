#include "selcheck/lp.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace selcheck {

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);
// Entries this small after elimination are rounding residue of exact zeros.
constexpr double kSnap = 1e-12;
// Primal infeasibility tolerated inside the ratio test.
constexpr double kHarris = 1e-9;
// Consecutive degenerate pivots before pricing switches to Bland's rule.
constexpr std::size_t kStallLimit = 30;

// Dense tableau in canonical form. Row i reads  x_{basis[i]} + sum_j a(i,j) x_j = rhs(i).
// `z` holds reduced costs z_j - c_j; the last entry is the current objective value.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0), z_(cols + 1, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    double rhs(std::size_t i) const { return at(i, cols_); }
    std::vector<std::size_t>& basis() { return basis_; }
    const std::vector<std::size_t>& basis() const { return basis_; }
    double objective() const { return z_[cols_]; }

    void price(const std::vector<double>& cost) {
        for (std::size_t j = 0; j <= cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) s += cost[basis_[i]] * at(i, j);
            z_[j] = s - (j < cols_ ? cost[j] : 0.0);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const std::size_t stride = cols_ + 1;
        double* prow = &data_[r * stride];
        const double inv = 1.0 / prow[c];
        for (std::size_t j = 0; j < stride; ++j) prow[j] *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            double* row = &data_[i * stride];
            const double f = row[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < stride; ++j) {
                row[j] -= f * prow[j];
                if (std::abs(row[j]) < kSnap) row[j] = 0.0;
            }
            row[c] = 0.0;
        }
        const double f = z_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j < stride; ++j) {
                z_[j] -= f * prow[j];
                if (std::abs(z_[j]) < kSnap) z_[j] = 0.0;
            }
            z_[c] = 0.0;
        }
        basis_[r] = c;
    }

    void drop_row(std::size_t r) {
        const std::size_t stride = cols_ + 1;
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * stride),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * stride));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

    // Dantzig pricing picks the most negative reduced cost; Bland picks the lowest improving index.
    std::size_t entering(const std::vector<bool>& allowed, double tol, bool bland) const {
        std::size_t best = kNoColumn;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (!allowed[j] || z_[j] >= -tol) continue;
            if (bland) return j;
            if (best == kNoColumn || z_[j] < z_[best]) best = j;
        }
        return best;
    }

    // Two-pass (Harris) ratio test. Pass one finds the largest step that keeps every basic
    // variable above -kHarris; pass two chooses among rows blocking within that step: the
    // largest pivot element normally, the lowest basic index under Bland's rule.
    std::size_t leaving(std::size_t c, double tol, bool bland) const {
        double step = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows_; ++i) {
            const double a = at(i, c);
            if (a > tol) step = std::min(step, (std::max(rhs(i), 0.0) + kHarris) / a);
        }
        if (!std::isfinite(step)) return kNoColumn;
        std::size_t best = kNoColumn;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double a = at(i, c);
            if (a <= tol || std::max(rhs(i), 0.0) / a > step) continue;
            if (best == kNoColumn) {
                best = i;
            } else if (bland ? basis_[i] < basis_[best] : a > at(best, c)) {
                best = i;
            }
        }
        return best;
    }

    void clamp_rhs() {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (rhs(i) < 0.0) rhs(i) = 0.0;
        }
    }

    void dump(std::ostream& os, const char* label) const {
        fmt::print(os, "-- {} ({} rows x {} cols), objective {}\n", label, rows_, cols_, objective());
        for (std::size_t i = 0; i < rows_; ++i) {
            fmt::print(os, "x{:<4}|", basis_[i]);
            for (std::size_t j = 0; j < cols_; ++j) fmt::print(os, " {:9.4g}", at(i, j));
            fmt::print(os, " | {:9.4g}\n", rhs(i));
        }
        fmt::print(os, "z    |");
        for (std::size_t j = 0; j < cols_; ++j) fmt::print(os, " {:9.4g}", z_[j]);
        fmt::print(os, " | {:9.4g}\n", objective());
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
    std::vector<double> z_;
};

enum class PhaseResult { optimal, unbounded };

PhaseResult run_phase(Tableau& t, const std::vector<double>& cost, const std::vector<bool>& allowed,
                      const SimplexOptions& opt, std::size_t& pivots, const char* label) {
    t.price(cost);
    if (opt.trace) t.dump(*opt.trace, label);
    // Bland's rule is engaged on every degenerate stall and held until the objective
    // strictly improves, so the loop terminates; the cap only guards against numerical livelock.
    const std::size_t cap = 50'000 + 200 * (t.rows() + t.cols());
    std::size_t stalled = 0;
    for (std::size_t iter = 0; iter < cap; ++iter) {
        const bool bland = stalled >= kStallLimit;
        std::size_t c = t.entering(allowed, opt.pivot_tolerance, bland);
        if (c == kNoColumn) return PhaseResult::optimal;
        std::size_t r = t.leaving(c, opt.pivot_tolerance, bland);
        if (r == kNoColumn) return PhaseResult::unbounded;
        const double before = t.objective();
        t.pivot(r, c);
        t.clamp_rhs();
        ++pivots;
        if (t.objective() > before + 1e-12 * std::max(1.0, std::abs(before))) {
            stalled = 0;
        } else {
            ++stalled;
        }
        if (opt.trace) t.dump(*opt.trace, label);
    }
    throw std::runtime_error("simplex iteration cap exceeded");
}

void check_dimensions(const LinearProgram& lp) {
    const std::size_t n = lp.num_variables();
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        if (lp.constraints[i].coefficients.size() != n)
            throw std::invalid_argument(fmt::format("constraint {} has {} coefficients, expected {}", i,
                                                    lp.constraints[i].coefficients.size(), n));
    }
    if (!lp.lower_bounds.empty() && lp.lower_bounds.size() != n)
        throw std::invalid_argument("lower_bounds length does not match objective");
    if (!lp.upper_bounds.empty() && lp.upper_bounds.size() != n)
        throw std::invalid_argument("upper_bounds length does not match objective");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(lp.lower(i))) throw std::invalid_argument("lower bounds must be finite");
        if (std::isnan(lp.upper(i))) throw std::invalid_argument("upper bound is NaN");
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
    check_dimensions(lp);
    const std::size_t n = lp.num_variables();
    LpSolution sol;

    for (std::size_t i = 0; i < n; ++i) {
        if (lp.upper(i) < lp.lower(i) - opt.feasibility_tolerance) return sol;  // infeasible
    }

    // Shift x = lower + y so every variable is y >= 0, then collect rows with rhs >= 0.
    struct Row {
        std::vector<double> a;
        Relation rel;
        double b;
    };
    std::vector<Row> rows;
    rows.reserve(lp.constraints.size() + n);
    for (const auto& con : lp.constraints) {
        double b = con.rhs;
        for (std::size_t j = 0; j < n; ++j) b -= con.coefficients[j] * lp.lower(j);
        rows.push_back({con.coefficients, con.relation, b});
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(lp.upper(j))) {
            std::vector<double> a(n, 0.0);
            a[j] = 1.0;
            rows.push_back({std::move(a), Relation::less_equal, lp.upper(j) - lp.lower(j)});
        }
    }
    for (auto& r : rows) {
        double scale = 0.0;
        for (double v : r.a) scale = std::max(scale, std::abs(v));
        if (scale > 0.0) {
            for (double& v : r.a) v /= scale;
            r.b /= scale;
        }
        if (r.b < 0.0) {
            for (double& v : r.a) v = -v;
            r.b = -r.b;
            if (r.rel == Relation::less_equal) {
                r.rel = Relation::greater_equal;
            } else if (r.rel == Relation::greater_equal) {
                r.rel = Relation::less_equal;
            }
        }
    }

    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const auto& r : rows) {
        if (r.rel != Relation::equal) ++n_slack;
        if (r.rel != Relation::less_equal) ++n_art;
    }
    const std::size_t m = rows.size();
    const std::size_t first_art = n + n_slack;
    const std::size_t cols = first_art + n_art;

    Tableau t(m, cols);
    std::size_t slack = n;
    std::size_t art = first_art;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = rows[i].a[j];
        t.rhs(i) = rows[i].b;
        switch (rows[i].rel) {
            case Relation::less_equal:
                t.at(i, slack) = 1.0;
                t.basis()[i] = slack++;
                break;
            case Relation::greater_equal:
                t.at(i, slack++) = -1.0;
                t.at(i, art) = 1.0;
                t.basis()[i] = art++;
                break;
            case Relation::equal:
                t.at(i, art) = 1.0;
                t.basis()[i] = art++;
                break;
        }
    }

    std::vector<bool> allowed(cols, true);
    if (n_art > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t j = first_art; j < cols; ++j) phase1[j] = -1.0;
        run_phase(t, phase1, allowed, opt, sol.pivots, "phase 1");
        if (t.objective() < -opt.feasibility_tolerance) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        // Drive zero-level artificials out of the basis; rows that cannot pivot are redundant.
        for (std::size_t i = 0; i < t.rows();) {
            if (t.basis()[i] < first_art) {
                ++i;
                continue;
            }
            std::size_t col = kNoColumn;
            for (std::size_t j = 0; j < first_art; ++j) {
                const double a = std::abs(t.at(i, j));
                if (a > opt.pivot_tolerance && (col == kNoColumn || a > std::abs(t.at(i, col)))) col = j;
            }
            if (col == kNoColumn) {
                t.drop_row(i);
            } else {
                t.pivot(i, col);
                t.clamp_rhs();
                ++sol.pivots;
                ++i;
            }
        }
        for (std::size_t j = first_art; j < cols; ++j) allowed[j] = false;
    }

    std::vector<double> phase2(cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.objective[j];
    if (run_phase(t, phase2, allowed, opt, sol.pivots, "phase 2") == PhaseResult::unbounded) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    sol.status = LpStatus::optimal;
    sol.values.assign(n, 0.0);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        if (t.basis()[i] < n) sol.values[t.basis()[i]] = t.rhs(i);
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sol.values[j] += lp.lower(j);
        sol.objective += lp.objective[j] * sol.values[j];
    }
    return sol;
}

namespace {

double row_violation(const Constraint& c, const std::vector<double>& x) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coefficients[j] * x[j];
    switch (c.relation) {
        case Relation::less_equal: return std::max(0.0, lhs - c.rhs);
        case Relation::greater_equal: return std::max(0.0, c.rhs - lhs);
        case Relation::equal: return std::abs(lhs - c.rhs);
    }
    return 0.0;
}

}  // namespace

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& c : lp.constraints) worst = std::max(worst, row_violation(c, x));
    for (std::size_t j = 0; j < x.size(); ++j) {
        worst = std::max(worst, lp.lower(j) - x[j]);
        worst = std::max(worst, x[j] - lp.upper(j));
    }
    return worst;
}

LpSolution solve_lp_lazy(const LinearProgram& lp, std::size_t first_lazy, const SimplexOptions& opt,
                         std::size_t batch) {
    check_dimensions(lp);
    first_lazy = std::min(first_lazy, lp.constraints.size());
    batch = std::max<std::size_t>(batch, 1);
    constexpr double kCutTolerance = 1e-9;

    std::vector<bool> active(lp.constraints.size(), false);
    for (std::size_t i = 0; i < first_lazy; ++i) active[i] = true;

    LinearProgram sub;
    sub.objective = lp.objective;
    sub.lower_bounds = lp.lower_bounds;
    sub.upper_bounds = lp.upper_bounds;
    std::size_t pivots = 0;

    for (;;) {
        sub.constraints.clear();
        for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
            if (active[i]) sub.constraints.push_back(lp.constraints[i]);
        }
        LpSolution sol = solve_lp(sub, opt);
        pivots += sol.pivots;
        if (sol.status == LpStatus::unbounded) {
            sol = solve_lp(lp, opt);
            sol.pivots += pivots;
            return sol;
        }
        if (sol.status == LpStatus::infeasible) {
            sol.pivots = pivots;
            return sol;
        }

        std::vector<std::pair<double, std::size_t>> cuts;
        for (std::size_t i = first_lazy; i < lp.constraints.size(); ++i) {
            if (active[i]) continue;
            double v = row_violation(lp.constraints[i], sol.values);
            if (v > kCutTolerance) cuts.emplace_back(v, i);
        }
        if (cuts.empty()) {
            sol.pivots = pivots;
            return sol;
        }
        std::sort(cuts.begin(), cuts.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (std::size_t i = 0; i < std::min(batch, cuts.size()); ++i) active[cuts[i].second] = true;
    }
}

}  // namespace selcheck
