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

#ifndef COOPSCHED_EXACT_LP_HPP
#define COOPSCHED_EXACT_LP_HPP

#include <vector>

#include "coopsched/rational.hpp"

namespace coopsched {

enum class LpRelation { LessEqual, Equal, GreaterEqual };

struct LpConstraint {
    std::vector<Rational> coeffs;
    LpRelation relation = LpRelation::LessEqual;
    Rational rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    std::vector<Rational> solution;
};

/// Exact two-phase simplex (Bland's rule) for
///   maximize c'x  s.t.  constraints, x >= 0.
/// Dense rational tableau; intended for small instances (clique-coupled
/// scheduling subproblems and stable-set membership certificates).
LpResult solve_lp_exact(const std::vector<LpConstraint>& constraints,
                        const std::vector<Rational>& objective);

/// Feasibility-only variant (phase 1).
bool lp_feasible(const std::vector<LpConstraint>& constraints, int numVars);

}  // namespace coopsched

#endif
