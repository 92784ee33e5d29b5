#include "dicnc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dicnc {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Dense simplex tableau. Internally a minimization problem; rows are stored
// with nonnegative right-hand sides, slack/surplus columns appended, and
// artificial columns for rows lacking an identity column.
class Tableau {
  public:
    explicit Tableau(const LinearProgram& lp) : n_struct_(lp.num_vars) {
        const int m = static_cast<int>(lp.rows.size());
        rows_.resize(m);
        rhs_.resize(m);

        // Pass 1: normalize signs and count extra columns.
        std::vector<double> sign(m, 1.0);
        int n_slack = 0;
        for (int r = 0; r < m; ++r) {
            if (lp.rows[r].rhs < 0) sign[r] = -1.0;
            if (lp.rows[r].sense == RowSense::LessEq) ++n_slack;
        }
        n_total_ = n_struct_ + n_slack;
        // Artificial columns come after everything else; allocate lazily.
        basis_.assign(m, -1);

        int slack_at = n_struct_;
        std::vector<int> needs_artificial;
        for (int r = 0; r < m; ++r) {
            const auto& row = lp.rows[r];
            rows_[r].assign(n_total_, 0.0);
            for (const auto& [j, v] : row.coeffs) {
                if (j < 0 || j >= n_struct_)
                    throw std::invalid_argument("lp: coefficient references unknown variable");
                rows_[r][j] += sign[r] * v;
            }
            rhs_[r] = sign[r] * row.rhs;
            if (row.sense == RowSense::LessEq) {
                // sign-flipped <= becomes >=: slack coefficient flips too.
                rows_[r][slack_at] = sign[r];
                if (sign[r] > 0) {
                    basis_[r] = slack_at;
                } else {
                    needs_artificial.push_back(r);
                }
                ++slack_at;
            } else {
                needs_artificial.push_back(r);
            }
        }

        first_artificial_ = n_total_;
        n_total_ += static_cast<int>(needs_artificial.size());
        for (auto& row : rows_) row.resize(n_total_, 0.0);
        int art = first_artificial_;
        for (int r : needs_artificial) {
            rows_[r][art] = 1.0;
            basis_[r] = art;
            ++art;
        }
    }

    // Phase 1: minimize the sum of artificial variables.
    bool phase1(long& iter_budget) {
        cost_.assign(n_total_, 0.0);
        for (int j = first_artificial_; j < n_total_; ++j) cost_[j] = 1.0;
        cost_rhs_ = 0.0;
        price_out_basis();
        if (!optimize(iter_budget, /*allow_artificial=*/true)) return false;
        if (cost_rhs_ < -kFeasTol) {
            status_ = LpStatus::Infeasible;
            return false;
        }
        drive_out_artificials();
        return true;
    }

    // Phase 2: minimize -objective (i.e. maximize the original objective).
    bool phase2(const LinearProgram& lp, long& iter_budget) {
        cost_.assign(n_total_, 0.0);
        for (int j = 0; j < n_struct_; ++j) cost_[j] = -lp.objective[j];
        cost_rhs_ = 0.0;
        price_out_basis();
        return optimize(iter_budget, /*allow_artificial=*/false);
    }

    LpSolution extract() const {
        LpSolution sol;
        sol.status = status_;
        sol.x.assign(n_struct_, 0.0);
        for (std::size_t r = 0; r < basis_.size(); ++r) {
            if (basis_[r] >= 0 && basis_[r] < n_struct_) sol.x[basis_[r]] = rhs_[r];
        }
        // cost_rhs_ tracks -z for the phase-2 minimization of -c.x, so the
        // maximized objective is cost_rhs_ negated twice: recompute directly.
        return sol;
    }

    LpStatus status() const { return status_; }

  private:
    void price_out_basis() {
        for (std::size_t r = 0; r < basis_.size(); ++r) {
            const int b = basis_[r];
            const double c = cost_[b];
            if (std::abs(c) < kPivotTol) continue;
            for (int j = 0; j < n_total_; ++j) cost_[j] -= c * rows_[r][j];
            cost_[b] = 0.0;
            cost_rhs_ -= c * rhs_[r];
        }
    }

    void pivot(int row, int col) {
        const double p = rows_[row][col];
        const double inv = 1.0 / p;
        for (int j = 0; j < n_total_; ++j) rows_[row][j] *= inv;
        rows_[row][col] = 1.0;
        rhs_[row] *= inv;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (static_cast<int>(r) == row) continue;
            const double f = rows_[r][col];
            if (std::abs(f) < kPivotTol) continue;
            for (int j = 0; j < n_total_; ++j) rows_[r][j] -= f * rows_[row][j];
            rows_[r][col] = 0.0;
            rhs_[r] -= f * rhs_[row];
            if (rhs_[r] < 0 && rhs_[r] > -kFeasTol) rhs_[r] = 0;
        }
        const double f = cost_[col];
        if (std::abs(f) >= kPivotTol) {
            for (int j = 0; j < n_total_; ++j) cost_[j] -= f * rows_[row][j];
            cost_[col] = 0.0;
            cost_rhs_ -= f * rhs_[row];
        }
        basis_[row] = col;
    }

    // Returns false on unboundedness/iteration exhaustion/infeasibility.
    bool optimize(long& iter_budget, bool allow_artificial) {
        const int m = static_cast<int>(rows_.size());
        long degenerate_streak = 0;
        const long bland_after = 2L * (m + n_total_);
        while (iter_budget-- > 0) {
            const bool bland = degenerate_streak > bland_after;
            int enter = -1;
            double best = -kPivotTol;
            const int limit = allow_artificial ? n_total_ : first_artificial_;
            for (int j = 0; j < limit; ++j) {
                const double c = cost_[j];
                if (c < best) {
                    enter = j;
                    if (bland) break;  // smallest index with negative cost
                    best = c;
                }
            }
            if (enter < 0) {
                status_ = LpStatus::Optimal;
                return true;
            }
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                const double a = rows_[r][enter];
                if (a <= kPivotTol) continue;
                const double ratio = rhs_[r] / a;
                if (ratio < best_ratio - kPivotTol ||
                    (ratio < best_ratio + kPivotTol && leave >= 0 &&
                     basis_[r] < basis_[leave])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave < 0) {
                status_ = LpStatus::Unbounded;
                return false;
            }
            if (best_ratio < kPivotTol) {
                ++degenerate_streak;
            } else {
                degenerate_streak = 0;
            }
            pivot(leave, enter);
        }
        status_ = LpStatus::IterLimit;
        return false;
    }

    // After phase 1, pivot any artificial still basic (at value zero) onto a
    // structural or slack column; rows with no such column are redundant and
    // keep the artificial pinned at zero.
    void drive_out_artificials() {
        for (std::size_t r = 0; r < basis_.size(); ++r) {
            if (basis_[r] < first_artificial_) continue;
            int col = -1;
            for (int j = 0; j < first_artificial_; ++j) {
                if (std::abs(rows_[r][j]) > 1e-7) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) pivot(static_cast<int>(r), col);
        }
    }

    int n_struct_ = 0;
    int n_total_ = 0;
    int first_artificial_ = 0;
    std::vector<std::vector<double>> rows_;
    std::vector<double> rhs_;
    std::vector<double> cost_;
    double cost_rhs_ = 0.0;
    std::vector<int> basis_;
    LpStatus status_ = LpStatus::IterLimit;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, long max_iterations) {
    if (static_cast<int>(lp.objective.size()) != lp.num_vars)
        throw std::invalid_argument("lp: objective size mismatch");
    Tableau t(lp);
    long budget = max_iterations;
    LpSolution sol;
    if (!t.phase1(budget) || !t.phase2(lp, budget)) {
        sol.status = t.status();
        sol.x.assign(lp.num_vars, 0.0);
        return sol;
    }
    sol = t.extract();
    sol.status = LpStatus::Optimal;
    double z = 0;
    for (int j = 0; j < lp.num_vars; ++j) z += lp.objective[j] * sol.x[j];
    sol.objective = z;
    return sol;
}

std::string LinearProgram::to_text() const {
    std::ostringstream os;
    os << "maximize";
    for (int j = 0; j < num_vars; ++j)
        if (objective[j] != 0) os << " + " << objective[j] << "*x" << j;
    os << "\nsubject to\n";
    for (const auto& row : rows) {
        for (const auto& [j, v] : row.coeffs) os << " + " << v << "*x" << j;
        os << (row.sense == RowSense::LessEq ? " <= " : " == ") << row.rhs << "\n";
    }
    return os.str();
}

}  // namespace dicnc
