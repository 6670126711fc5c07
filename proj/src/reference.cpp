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

#include "coopsched/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coopsched/exact_lp.hpp"

namespace coopsched {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Dense problem view of a TableInstance in the reduced variables alpha_sk.
struct Problem {
    const TableInstance* inst;
    int numSets, numStates, numUsers, numCliques;
    std::vector<std::vector<std::vector<double>>> meanRate;  ///< [i][s][k], E over z
    std::vector<std::vector<bool>> relays;                   ///< [s][i]
    std::vector<std::vector<double>> cliqueCoeff;            ///< [q][s], availability-scaled
    std::vector<Rational> cliqueCoeffExact;                  ///< flattened [q * numSets + s]
    double barrierIndex = 0.0;                               ///< 0 disables the barrier
    bool hardCliques = true;

    explicit Problem(const TableInstance& instance) : inst(&instance) {
        numSets = instance.numSets();
        numStates = instance.numStates();
        numUsers = instance.numUsers;
        numCliques = static_cast<int>(instance.cliques.cliques.size());
        meanRate.assign(numUsers, std::vector<std::vector<double>>(
                                      numSets, std::vector<double>(numStates)));
        for (int i = 0; i < numUsers; ++i)
            for (int s = 0; s < numSets; ++s)
                for (int k = 0; k < numStates; ++k)
                    meanRate[i][s][k] = instance.expectedUserRate(i, s, k);
        relays.assign(numSets, std::vector<bool>(numUsers, false));
        for (int s = 0; s < numSets; ++s) relays[s] = instance.relaysOf(s);

        cliqueCoeff.assign(numCliques, std::vector<double>(numSets, 0.0));
        cliqueCoeffExact.assign(static_cast<std::size_t>(numCliques) * numSets, Rational(0));
        for (int s = 0; s < numSets; ++s) {
            const auto pairIdx = instance.relayPairIndices(instance.sets[s]);
            for (int q = 0; q < numCliques; ++q) {
                Rational coeff(0);
                for (int v : pairIdx) {
                    const auto& clique = instance.cliques.cliques[q];
                    if (std::binary_search(clique.begin(), clique.end(), v))
                        coeff += Rational(1) / instance.availability[v];
                }
                cliqueCoeffExact[static_cast<std::size_t>(q) * numSets + s] = coeff;
                cliqueCoeff[q][s] = toDouble(coeff);
            }
        }
    }

    int var(int s, int k) const { return s * numStates + k; }
    int numVars() const { return numSets * numStates; }

    void evaluate(const std::vector<double>& alpha, std::vector<double>& r,
                  std::vector<double>& beta, std::vector<double>& load) const {
        r.assign(numUsers, 0.0);
        beta.assign(numUsers, 0.0);
        load.assign(numCliques, 0.0);
        for (int s = 0; s < numSets; ++s) {
            double mass = 0.0;
            for (int k = 0; k < numStates; ++k) {
                const double a = alpha[var(s, k)];
                mass += a;
                for (int i = 0; i < numUsers; ++i) r[i] += meanRate[i][s][k] * a;
            }
            for (int i = 0; i < numUsers; ++i)
                if (relays[s][i]) beta[i] += mass;
            for (int q = 0; q < numCliques; ++q)
                if (cliqueCoeff[q][s] > 0.0) load[q] += cliqueCoeff[q][s] * mass;
        }
    }

    double objective(const std::vector<double>& r, const std::vector<double>& beta,
                     const std::vector<double>& load) const {
        double u = 0.0;
        for (int i = 0; i < numUsers; ++i) {
            if (r[i] <= 0.0 || beta[i] >= 1.0) return kNegInf;
            u += std::log(r[i]) + inst->kappa * std::log1p(-beta[i]);
        }
        if (barrierIndex > 0.0)
            for (int q = 0; q < numCliques; ++q) {
                const double e = barrierIndex * (load[q] - 1.0);
                u -= std::exp(std::min(e, 700.0));
            }
        return u;
    }

    double objectiveAt(const std::vector<double>& alpha) const {
        std::vector<double> r, beta, load;
        evaluate(alpha, r, beta, load);
        return objective(r, beta, load);
    }

    void gradient(const std::vector<double>& r, const std::vector<double>& beta,
                  const std::vector<double>& load, std::vector<double>& grad) const {
        grad.assign(numVars(), 0.0);
        std::vector<double> barrierSlope(numCliques, 0.0);
        if (barrierIndex > 0.0)
            for (int q = 0; q < numCliques; ++q) {
                const double e = barrierIndex * (load[q] - 1.0);
                barrierSlope[q] = barrierIndex * std::exp(std::min(e, 700.0));
            }
        for (int s = 0; s < numSets; ++s) {
            double massTerm = 0.0;
            for (int i = 0; i < numUsers; ++i)
                if (relays[s][i]) massTerm -= inst->kappa / (1.0 - beta[i]);
            if (barrierIndex > 0.0)
                for (int q = 0; q < numCliques; ++q)
                    if (cliqueCoeff[q][s] > 0.0) massTerm -= barrierSlope[q] * cliqueCoeff[q][s];
            for (int k = 0; k < numStates; ++k) {
                double g = massTerm;
                for (int i = 0; i < numUsers; ++i)
                    if (meanRate[i][s][k] > 0.0) g += meanRate[i][s][k] / r[i];
                grad[var(s, k)] = g;
            }
        }
    }

    bool vertexFeasible(const std::vector<double>& alpha) const {
        if (!hardCliques) return true;
        std::vector<double> r, beta, load;
        evaluate(alpha, r, beta, load);
        for (int q = 0; q < numCliques; ++q)
            if (load[q] > 1.0 + 1e-12) return false;
        return true;
    }

    /// Best vertex of the availability box alone: all per-state mass on the
    /// highest-gradient set. Exact for optn, and for opt3 whenever the
    /// result satisfies the clique rows.
    std::vector<double> boxArgmax(const std::vector<double>& grad) const {
        std::vector<double> y(numVars(), 0.0);
        for (int k = 0; k < numStates; ++k) {
            int best = 0;
            double bestVal = grad[var(0, k)];
            for (int s = 1; s < numSets; ++s)
                if (grad[var(s, k)] > bestVal) {
                    bestVal = grad[var(s, k)];
                    best = s;
                }
            y[var(best, k)] = inst->stateProbs[k];
        }
        return y;
    }

    /// Exact LP over the clique-coupled polytope.
    std::vector<double> lpArgmax(const std::vector<double>& grad) const {
        std::vector<LpConstraint> cons;
        for (int k = 0; k < numStates; ++k) {
            LpConstraint c;
            c.coeffs.assign(numVars(), Rational(0));
            for (int s = 0; s < numSets; ++s) c.coeffs[var(s, k)] = 1;
            c.relation = LpRelation::LessEqual;
            c.rhs = exactRational(inst->stateProbs[k]);
            cons.push_back(std::move(c));
        }
        for (int q = 0; q < numCliques; ++q) {
            LpConstraint c;
            c.coeffs.assign(numVars(), Rational(0));
            bool any = false;
            for (int s = 0; s < numSets; ++s) {
                const Rational& coeff =
                    cliqueCoeffExact[static_cast<std::size_t>(q) * numSets + s];
                if (coeff == 0) continue;
                any = true;
                for (int k = 0; k < numStates; ++k) c.coeffs[var(s, k)] = coeff;
            }
            if (!any) continue;
            c.relation = LpRelation::LessEqual;
            c.rhs = 1;
            cons.push_back(std::move(c));
        }
        std::vector<Rational> obj(numVars());
        for (int v = 0; v < numVars(); ++v) obj[v] = exactRational(grad[v]);
        const LpResult res = solve_lp_exact(cons, obj);
        if (res.status != LpStatus::Optimal)
            throw std::logic_error("scheduling subproblem LP failed");
        std::vector<double> y(numVars());
        for (int v = 0; v < numVars(); ++v) y[v] = toDouble(res.solution[v]);
        return y;
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Feasible strictly-interior start: uniform per-state mixture, scaled toward
/// the empty set until the clique constraints have slack.
std::vector<double> startPoint(const Problem& p) {
    std::vector<double> alpha(p.numVars(), 0.0);
    for (int k = 0; k < p.numStates; ++k)
        for (int s = 0; s < p.numSets; ++s)
            alpha[p.var(s, k)] = p.inst->stateProbs[k] / p.numSets;

    std::vector<double> r, beta, load;
    p.evaluate(alpha, r, beta, load);
    double worst = 0.0;
    for (double l : load) worst = std::max(worst, l);
    if (p.hardCliques && worst > 0.9) {
        const double scale = 0.9 / worst;
        for (int k = 0; k < p.numStates; ++k) {
            double freed = 0.0;
            for (int s = 1; s < p.numSets; ++s) {
                const double& a = alpha[p.var(s, k)];
                freed += a * (1.0 - scale);
                alpha[p.var(s, k)] = a * scale;
            }
            alpha[p.var(0, k)] += freed;  // sets[0] is empty
        }
    }
    return alpha;
}

SolveReport runSolver(const Problem& p, double fwTol, long maxIterations) {
    std::vector<double> alpha = startPoint(p);
    std::vector<double> r, beta, load, grad;
    std::vector<std::vector<double>> vertexCache;

    SolveReport report;
    long iter = 0;
    double gap = std::numeric_limits<double>::infinity();

    while (iter < maxIterations) {
        p.evaluate(alpha, r, beta, load);
        const double current = p.objective(r, beta, load);
        p.gradient(r, beta, load, grad);

        // Linear subproblem: per-state argmax, exact LP when the clique
        // coupling is active.
        std::vector<double> direction = p.boxArgmax(grad);
        bool exact = true;
        if (!p.vertexFeasible(direction)) {
            // A cached vertex is often as good; certify with the LP only
            // when the cheap bound stalls below the tolerance.
            exact = false;
            double bestVal = -std::numeric_limits<double>::infinity();
            const std::vector<double>* bestVertex = nullptr;
            for (const auto& v : vertexCache) {
                const double val = dot(grad, v);
                if (val > bestVal) {
                    bestVal = val;
                    bestVertex = &v;
                }
            }
            const double cheapGap = bestVertex ? bestVal - dot(grad, alpha) : kNegInf;
            if (!bestVertex || cheapGap < 4.0 * fwTol) {
                direction = p.lpArgmax(grad);
                vertexCache.push_back(direction);
                if (vertexCache.size() > 64) vertexCache.erase(vertexCache.begin());
                exact = true;
            } else {
                direction = *bestVertex;
            }
        }

        gap = dot(grad, direction) - dot(grad, alpha);
        if (exact && gap < fwTol) break;

        // Step 2/(iter+2), halved while the (concave) objective decreases.
        double step = 2.0 / (iter + 2.0);
        std::vector<double> trial(alpha.size());
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t v = 0; v < alpha.size(); ++v)
                trial[v] = alpha[v] + step * (direction[v] - alpha[v]);
            if (p.objectiveAt(trial) >= current) break;
            step *= 0.5;
        }
        alpha.swap(trial);
        ++iter;
    }

    p.evaluate(alpha, r, beta, load);
    report.optValue = p.objective(r, beta, load);
    report.alpha = alpha;
    report.iterations = iter;
    report.fwGap = gap;
    report.throughput = r;
    report.relayFraction = beta;

    double viol = 0.0;
    for (double a : alpha) viol = std::max(viol, -a);
    for (int k = 0; k < p.numStates; ++k) {
        double mass = 0.0;
        for (int s = 0; s < p.numSets; ++s) mass += alpha[p.var(s, k)];
        viol = std::max(viol, mass - p.inst->stateProbs[k]);
    }
    if (p.hardCliques)
        for (int q = 0; q < p.numCliques; ++q) viol = std::max(viol, load[q] - 1.0);
    report.maxConstraintViolation = std::max(viol, 0.0);
    return report;
}

}  // namespace

json SolveReport::toJson() const {
    json j;
    j["opt_value"] = optValue;
    j["iterations"] = iterations;
    j["fw_gap"] = fwGap;
    j["throughput"] = throughput;
    j["relay_fraction"] = relayFraction;
    j["max_constraint_violation"] = maxConstraintViolation;
    j["alpha"] = alpha;
    return j;
}

void rates_from_alpha(const TableInstance& instance, const std::vector<double>& alpha,
                      std::vector<double>& throughputOut, std::vector<double>& relayOut) {
    Problem p(instance);
    std::vector<double> load;
    p.evaluate(alpha, throughputOut, relayOut, load);
}

std::vector<double> clique_occupancy(const TableInstance& instance,
                                     const std::vector<double>& alpha) {
    Problem p(instance);
    std::vector<double> r, beta, load;
    p.evaluate(alpha, r, beta, load);
    return load;
}

SolveReport solve_opt3(const TableInstance& instance, double fwTol, long maxIterations) {
    Problem p(instance);
    return runSolver(p, fwTol, maxIterations);
}

SolveReport solve_optn(const TableInstance& instance, double barrierIndex, double fwTol,
                       long maxIterations) {
    if (barrierIndex < 1.0) throw std::invalid_argument("barrier index must be >= 1");
    Problem p(instance);
    p.barrierIndex = barrierIndex;
    p.hardCliques = false;
    return runSolver(p, fwTol, maxIterations);
}

bool check_fairness(const TableInstance& instance, const std::vector<double>& alphaOpt,
                    const std::vector<double>& alphaPerturbed, double tol) {
    std::vector<double> rOpt, betaOpt, rPert, betaPert;
    rates_from_alpha(instance, alphaOpt, rOpt, betaOpt);
    rates_from_alpha(instance, alphaPerturbed, rPert, betaPert);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < instance.numUsers; ++i) {
        if (rOpt[i] <= 0.0 || betaOpt[i] >= 1.0)
            throw std::invalid_argument("optimum must have positive rates and beta < 1");
        lhs += (rPert[i] - rOpt[i]) / rOpt[i];
        rhs += (betaPert[i] - betaOpt[i]) / (1.0 - betaOpt[i]);
    }
    return lhs <= instance.kappa * rhs + tol;
}

std::vector<double> random_feasible_alpha(const TableInstance& instance, RandomStream& rng) {
    Problem p(instance);
    std::vector<double> alpha(p.numVars(), 0.0);
    for (int k = 0; k < p.numStates; ++k) {
        std::vector<double> w(p.numSets);
        double total = 0.0;
        for (int s = 0; s < p.numSets; ++s) {
            w[s] = -std::log(1.0 - rng.uniform());
            total += w[s];
        }
        const double use = rng.uniform(0.3, 1.0) * instance.stateProbs[k];
        for (int s = 0; s < p.numSets; ++s) alpha[p.var(s, k)] = use * w[s] / total;
    }
    // Scale relay mass toward the empty set until the clique rows hold.
    std::vector<double> r, beta, load;
    p.evaluate(alpha, r, beta, load);
    double worst = 0.0;
    for (double l : load) worst = std::max(worst, l);
    if (worst > 1.0) {
        const double scale = 0.95 / worst;
        for (int k = 0; k < p.numStates; ++k) {
            double freed = 0.0;
            for (int s = 1; s < p.numSets; ++s) {
                freed += alpha[p.var(s, k)] * (1.0 - scale);
                alpha[p.var(s, k)] *= scale;
            }
            alpha[p.var(0, k)] += freed;
        }
    }
    return alpha;
}

}  // namespace coopsched
