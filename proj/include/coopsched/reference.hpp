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

#ifndef COOPSCHED_REFERENCE_HPP
#define COOPSCHED_REFERENCE_HPP

#include <json.hpp>
#include <vector>

#include "coopsched/rng.hpp"
#include "coopsched/table_model.hpp"

namespace coopsched {

/// Occupancy in the reduced variables alpha_sk (mass per schedule set and
/// known state); the z dimension is expanded as alpha_skz = q_z alpha_sk,
/// which enforces decision independence of the unknown state exactly.
/// Flattened layout: alpha[s * numStates + k].
struct SolveReport {
    double optValue = 0.0;
    std::vector<double> alpha;
    long iterations = 0;
    double fwGap = 0.0;                    ///< final Frank-Wolfe gap
    std::vector<double> throughput;        ///< r_i(alpha)
    std::vector<double> relayFraction;     ///< beta_i(alpha)
    double maxConstraintViolation = 0.0;

    nlohmann::json toJson() const;
};

/// Throughputs r_i(alpha) and relay fractions beta_i(alpha).
void rates_from_alpha(const TableInstance& instance, const std::vector<double>& alpha,
                      std::vector<double>& throughputOut, std::vector<double>& relayOut);

/// Clique occupancies alpha^Q (availability-scaled), one per maximal clique.
std::vector<double> clique_occupancy(const TableInstance& instance,
                                     const std::vector<double>& alpha);

/// Maximize sum_i [ln r_i + kappa ln(1 - beta_i)] over the occupancy
/// polytope with hard clique constraints, by conditional gradient. The
/// linear subproblem is a per-state argmax over schedule sets; when the
/// resulting vertex violates a clique constraint it is re-solved as an exact
/// rational LP. Stops at Frank-Wolfe gap < fwTol.
SolveReport solve_opt3(const TableInstance& instance, double fwTol = 1e-6,
                       long maxIterations = 5000000);

/// Same feasible set minus the clique rows; the constraint is moved into the
/// objective as -sum_Q exp(nB (alpha^Q - 1)).
SolveReport solve_optn(const TableInstance& instance, double barrierIndex, double fwTol = 1e-6,
                       long maxIterations = 5000000);

/// Fairness inequality at a solved optimum: for the perturbed feasible point
/// (r, beta), sum (r - rOpt)/rOpt <= kappa sum ((1-betaOpt)-(1-beta))/(1-betaOpt).
bool check_fairness(const TableInstance& instance, const std::vector<double>& alphaOpt,
                    const std::vector<double>& alphaPerturbed, double tol = 1e-6);

/// Random point of the opt3 feasible region (uniform per-state mixtures,
/// scaled toward zero until the clique constraints hold).
std::vector<double> random_feasible_alpha(const TableInstance& instance, RandomStream& rng);

}  // namespace coopsched

#endif
