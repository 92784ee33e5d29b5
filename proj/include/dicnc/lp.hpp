#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dicnc {

enum class RowSense { LessEq, Equal };

/// Maximize c.x subject to row constraints and x >= 0.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective;

    struct Row {
        std::vector<std::pair<int, double>> coeffs;
        RowSense sense = RowSense::LessEq;
        double rhs = 0;
    };
    std::vector<Row> rows;

    int add_var(double obj = 0.0) {
        objective.push_back(obj);
        return num_vars++;
    }
    void add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs) {
        rows.push_back(Row{std::move(coeffs), sense, rhs});
    }

    /// Plain-text dump for debugging exported instances.
    std::string to_text() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpSolution {
    LpStatus status = LpStatus::IterLimit;
    double objective = 0;
    std::vector<double> x;
};

/// Dense two-phase primal simplex. Dantzig pricing with a switch to Bland's
/// rule after a long degenerate streak, so it terminates on cycling instances.
LpSolution solve_lp(const LinearProgram& lp, long max_iterations = 200000);

}  // namespace dicnc
