// SPDX-License-Identifier: Apache-2.0
//
// coopsched - D2D-cooperative cellular downlink scheduling simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "coopsched/exact_lp.hpp"

#include <stdexcept>

namespace coopsched {

namespace {

/// Dense rational simplex tableau. Bland's rule everywhere, so no cycling.
class Tableau {
  public:
    Tableau(int rows, int cols) : rows_(rows), cols_(cols) {
        a_.assign(rows, std::vector<Rational>(cols + 1, Rational(0)));
        obj_.assign(cols + 1, Rational(0));
        basis_.assign(rows, -1);
    }

    std::vector<Rational>& row(int r) { return a_[r]; }
    std::vector<Rational>& objective() { return obj_; }
    std::vector<int>& basis() { return basis_; }
    int cols() const { return cols_; }
    int rows() const { return rows_; }

    void eliminateBasicFromObjective() {
        for (int r = 0; r < rows_; ++r) {
            const int b = basis_[r];
            if (b < 0 || obj_[b] == 0) continue;
            const Rational factor = obj_[b];
            for (int c = 0; c <= cols_; ++c) obj_[c] -= factor * a_[r][c];
        }
    }

    void pivot(int pr, int pc) {
        const Rational inv = Rational(1) / a_[pr][pc];
        for (int c = 0; c <= cols_; ++c) a_[pr][c] *= inv;
        for (int r = 0; r < rows_; ++r) {
            if (r == pr || a_[r][pc] == 0) continue;
            const Rational factor = a_[r][pc];
            for (int c = 0; c <= cols_; ++c) a_[r][c] -= factor * a_[pr][c];
        }
        if (obj_[pc] != 0) {
            const Rational factor = obj_[pc];
            for (int c = 0; c <= cols_; ++c) obj_[c] -= factor * a_[pr][c];
        }
        basis_[pr] = pc;
    }

    /// Maximize with Bland's rule over an allowed column range.
    /// Returns false when unbounded.
    bool optimize(int allowedCols) {
        for (;;) {
            int entering = -1;
            for (int c = 0; c < allowedCols; ++c)
                if (obj_[c] > 0) {
                    entering = c;
                    break;
                }
            if (entering < 0) return true;

            int leaving = -1;
            Rational bestRatio;
            for (int r = 0; r < rows_; ++r) {
                if (a_[r][entering] <= 0) continue;
                const Rational ratio = a_[r][cols_] / a_[r][entering];
                if (leaving < 0 || ratio < bestRatio ||
                    (ratio == bestRatio && basis_[r] < basis_[leaving])) {
                    leaving = r;
                    bestRatio = ratio;
                }
            }
            if (leaving < 0) return false;
            pivot(leaving, entering);
        }
    }

  private:
    int rows_, cols_;
    std::vector<std::vector<Rational>> a_;
    std::vector<Rational> obj_;
    std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp_exact(const std::vector<LpConstraint>& constraints,
                        const std::vector<Rational>& objective) {
    const int numVars = static_cast<int>(objective.size());
    const int m = static_cast<int>(constraints.size());

    // Column layout: [structural | slack/surplus | artificial].
    int numSlack = 0;
    for (const auto& c : constraints)
        if (c.relation != LpRelation::Equal) ++numSlack;
    const int artOffset = numVars + numSlack;
    const int totalCols = artOffset + m;  // one artificial per row at most

    Tableau t(m, totalCols);
    int slackIdx = numVars;
    int numArtificial = 0;
    for (int r = 0; r < m; ++r) {
        const auto& c = constraints[r];
        if (static_cast<int>(c.coeffs.size()) != numVars)
            throw std::invalid_argument("constraint arity mismatch");
        Rational sign(1);
        LpRelation rel = c.relation;
        Rational rhs = c.rhs;
        if (rhs < 0) {  // normalize to nonnegative rhs
            sign = -1;
            rhs = -rhs;
            if (rel == LpRelation::LessEqual)
                rel = LpRelation::GreaterEqual;
            else if (rel == LpRelation::GreaterEqual)
                rel = LpRelation::LessEqual;
        }
        auto& row = t.row(r);
        for (int v = 0; v < numVars; ++v) row[v] = sign * c.coeffs[v];
        row[totalCols] = rhs;

        if (rel == LpRelation::LessEqual) {
            row[slackIdx] = 1;
            t.basis()[r] = slackIdx++;
        } else if (rel == LpRelation::GreaterEqual) {
            row[slackIdx] = -1;
            ++slackIdx;
            row[artOffset + numArtificial] = 1;
            t.basis()[r] = artOffset + numArtificial++;
        } else {
            row[artOffset + numArtificial] = 1;
            t.basis()[r] = artOffset + numArtificial++;
        }
    }

    LpResult result;
    // Phase 1: drive the artificials to zero.
    if (numArtificial > 0) {
        auto& obj = t.objective();
        for (int k = 0; k < numArtificial; ++k) obj[artOffset + k] = -1;
        t.eliminateBasicFromObjective();
        if (!t.optimize(totalCols)) throw std::logic_error("phase-1 unbounded");
        if (t.objective()[totalCols] != 0) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Pivot residual artificials out of the basis where possible.
        for (int r = 0; r < m; ++r) {
            if (t.basis()[r] < artOffset) continue;
            for (int c = 0; c < artOffset; ++c)
                if (t.row(r)[c] != 0) {
                    t.pivot(r, c);
                    break;
                }
        }
    }

    // Phase 2.
    auto& obj = t.objective();
    std::fill(obj.begin(), obj.end(), Rational(0));
    for (int v = 0; v < numVars; ++v) obj[v] = objective[v];
    t.eliminateBasicFromObjective();
    if (!t.optimize(artOffset)) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    result.status = LpStatus::Optimal;
    result.value = -t.objective()[totalCols];
    result.solution.assign(numVars, Rational(0));
    for (int r = 0; r < m; ++r) {
        const int b = t.basis()[r];
        if (b >= 0 && b < numVars) result.solution[b] = t.row(r)[totalCols];
    }
    return result;
}

bool lp_feasible(const std::vector<LpConstraint>& constraints, int numVars) {
    const std::vector<Rational> zero(numVars, Rational(0));
    return solve_lp_exact(constraints, zero).status == LpStatus::Optimal;
}

}  // namespace coopsched
