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
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "coopsched/conflict.hpp"
#include "coopsched/phy.hpp"
#include "coopsched/reference.hpp"
#include "coopsched/sim.hpp"

using namespace coopsched;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

/// Default large-cell configuration shared by the simulation criteria.
SimConfig defaultLargeCell() {
    SimConfig c;
    c.net.numUsers = 25;
    c.net.numAntennas = 8;
    c.net.cellRadius = 1000.0;
    c.net.clusterStd = 20.0;
    c.net.clusterIntensity = 5.0 / (M_PI * 1e6);
    c.net.pathGain = 1.0;
    c.net.numPaths = 2;
    c.net.antennaSpacing = 0.5;
    c.net.d2dRefGain = 1e8;
    c.net.d2dExponent = 3.5;
    c.net.connectThreshold = 1.0;
    c.net.setUniformAvailability(1.0);
    c.net.rngSeed = 2026;
    c.frames = 5000;
    c.ewmaWindow = 50;
    c.kappa = 7.0;
    c.greedyEps = 0.02;
    c.maxStreams = 8;
    c.scheduler = SchedulerKind::Greedy;
    c.snrBackoffDb = 3.0;
    c.drops = 4;
    return c;
}

/// Cached simulation results shared between criteria 5, 8 and 9.
struct SharedRuns {
    std::optional<std::vector<DropResult>> coopKappa7;
    std::optional<std::vector<DropResult>> coopKappa0;
    std::optional<std::vector<DropResult>> baseline;

    const std::vector<DropResult>& get(std::optional<std::vector<DropResult>>& slot,
                                       bool cooperation, double kappa) {
        if (!slot) {
            SimConfig c = defaultLargeCell();
            c.cooperation = cooperation;
            c.kappa = kappa;
            slot = run_simulation(c, 1000);
        }
        return *slot;
    }
};

SharedRuns g_runs;

Outcome criterion1_capacityGap() {
    RandomStream root(7);
    const int antennas[3] = {2, 4, 8};
    double maxGap = -10.0, minGap = 10.0;
    long violations = 0;
    for (long trial = 0; trial < 1000; ++trial) {
        RandomStream rng = root.split(trial);
        const int m = antennas[rng.integer(3)];
        CMatrix h(2, m);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < m; ++c) h(r, c) = rng.complexGaussian();
        h.row(0) *= std::pow(10.0, rng.uniform(-20.0, 20.0) / 20.0);
        h.row(1) *= std::pow(10.0, rng.uniform(-20.0, 20.0) / 20.0);
        const Complex g = std::polar(std::pow(10.0, rng.uniform(-20.0, 20.0) / 20.0),
                                     rng.uniform(0.0, 2.0 * M_PI));
        const RateReport rep = gap_check(h, g);
        maxGap = std::max(maxGap, rep.gap);
        minGap = std::min(minGap, rep.gap);
        if (rep.gap < -1e-9 || rep.gap > 2.0 + 1e-9) ++violations;
    }
    Outcome out;
    out.pass = violations == 0;
    std::ostringstream os;
    os << "1000 instances, gap in [" << minGap << ", " << maxGap << "], violations "
       << violations;
    out.detail = os.str();
    return out;
}

Outcome criterion2_stabilityInnerBound() {
    RandomStream root(11);
    long members = 0, counterexamples = 0, chordalFailures = 0, cliqueExcess = 0;
    const Rational pChoices[3] = {Rational(1, 2), Rational(3, 4), Rational(1)};
    for (int trial = 0; trial < 500; ++trial) {
        RandomStream rng = root.split(trial);
        const int n = 3 + static_cast<int>(rng.integer(2));  // conflict graph <= 12 vertices
        RMatrix phi = RMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                phi(i, j) = phi(j, i) = rng.bernoulli(0.5) ? 2.0 : 0.1;
        const ConflictGraph cg = build_conflict(build_connectivity(phi, 1.0));
        const ChordalCompletion comp = chordalize(cg.graph);
        if (!verify_chordal(comp.graph) || !comp.graph.containsEdges(cg.graph))
            ++chordalFailures;
        const CliqueList cliques = maximal_cliques(comp);
        if (static_cast<int>(cliques.cliques.size()) > n * (n - 1)) ++cliqueExcess;

        LoadVector load;
        for (int v = 0; v < cg.graph.size(); ++v) {
            load.beta.push_back(Rational(static_cast<long>(rng.integer(20)), 40));
            load.availability.push_back(pChoices[rng.integer(3)]);
        }
        Rational worst(0);
        for (const auto& q : cliques.cliques) worst = std::max(worst, clique_load(load, q));
        if (worst > 0) {
            const Rational target(static_cast<long>(3 + rng.integer(8)), 10);
            for (auto& b : load.beta) b = b * target / worst;
        }
        if (inner_bound_member(load, cliques)) {
            ++members;
            if (!stability_member_bruteforce(load, cg.graph)) ++counterexamples;
        }
    }
    Outcome out;
    out.pass = counterexamples == 0 && chordalFailures == 0 && cliqueExcess == 0 &&
               members > 50;
    std::ostringstream os;
    os << "500 instances, " << members << " inner-bound members, " << counterexamples
       << " containment counterexamples, " << chordalFailures << " chordality failures";
    out.detail = os.str();
    return out;
}

Outcome criterion3_schedulerOptimality() {
    Outcome out;
    out.pass = true;
    std::ostringstream os;
    int variant = 0;
    for (const TableInstance& inst :
         {TableInstance::tinyTwoUser(1.0), TableInstance::tinyThreeUser(1.0)}) {
        CertificationConfig cc;
        cc.frames = 100000;
        cc.seed = 7;
        cc.fwTol = 1e-6;
        const CertificationResult res = certify_scheduler(inst, cc);
        const double tol = 0.05 * std::max(1.0, std::abs(res.optPrime));
        const bool ok = res.finalGap <= tol;
        out.pass = out.pass && ok;
        os << (variant == 0 ? "two-user" : "; three-user") << " |U*(1e5) - OPT'| = "
           << res.finalGap << " (OPT' = " << res.optPrime << ", tol " << tol << ")";
        ++variant;
    }
    out.detail = os.str();
    return out;
}

Outcome criterion4_barrierConvergence() {
    const TableInstance inst = TableInstance::tinyTwoUser(1.0);
    const SolveReport hard = solve_opt3(inst, 1e-6);
    const SolveReport soft = solve_optn(inst, 200.0, 1e-6);
    const double diff = std::abs(soft.optValue - hard.optValue);

    const TraceCompareResult cmp = compare_barrier_flow_traces(inst, 10000, 7, 200.0);

    Outcome out;
    out.pass = diff <= 1e-3 && cmp.identical;
    std::ostringstream os;
    os << "|OPT_200 - OPT'| = " << diff << " (tol 1e-3); traces over 1e4 frames "
       << (cmp.identical ? "identical" : "diverged at t=" + std::to_string(cmp.firstDivergence))
       << (cmp.boundaryHit ? " [boundary hit]" : "");
    out.detail = os.str();
    return out;
}

Outcome criterion5_relayQueueStability() {
    // Drift recursion and limsup cap on every clique trace of the shared
    // default-config runs, plus an intermittent-availability run.
    Outcome out;
    out.pass = true;
    double worstLoad = 0.0;
    const auto check = [&](const std::vector<DropResult>& drops) {
        for (const auto& d : drops) {
            out.pass = out.pass && d.driftRecursionOk;
            worstLoad = std::max(worstLoad, d.maxCliqueLoadAfterBurn);
        }
    };
    check(g_runs.get(g_runs.coopKappa7, true, 7.0));
    check(g_runs.get(g_runs.coopKappa0, true, 0.0));

    SimConfig intermittent = defaultLargeCell();
    intermittent.net.setUniformAvailability(0.625);  // exactly representable
    intermittent.frames = 2500;
    intermittent.drops = 2;
    intermittent.kappa = 0.0;  // heaviest relaying pressure
    check(run_simulation(intermittent, 1000));

    std::ostringstream os;
    os << "all clique traces satisfy the recursion; max load after burn-in " << worstLoad;
    Outcome res;
    res.pass = out.pass;
    res.detail = os.str();
    return res;
}

Outcome criterion6_fairness() {
    Outcome out;
    out.pass = true;
    std::ostringstream os;
    for (double kappa : {0.0, 1.0, 7.0}) {
        const TableInstance inst = TableInstance::tinyTwoUser(kappa);
        const SolveReport rep = solve_opt3(inst, 1e-6);
        RandomStream rng(101 + static_cast<int>(kappa));
        int failures = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto perturbed = random_feasible_alpha(inst, rng);
            if (!check_fairness(inst, rep.alpha, perturbed, 1e-6)) ++failures;
        }
        out.pass = out.pass && failures == 0;
        os << "kappa=" << kappa << ": " << failures << "/100 violations  ";
    }
    out.detail = os.str();
    return out;
}

Outcome criterion7_snrScaling() {
    ScalingConfig cfg;
    cfg.numAntennas = 8;
    cfg.pathGain = 1.0;
    cfg.numPaths = 2;
    cfg.seed = 1;
    const std::vector<int> sizes{10, 50, 250, 1250};
    const auto rows = scaling_experiment(sizes, 50, cfg);

    bool coopMonotone = true, noncoopMonotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        coopMonotone = coopMonotone && rows[i].coopMedian >= rows[i - 1].coopMedian;
        noncoopMonotone = noncoopMonotone && rows[i].noncoopMedian <= rows[i - 1].noncoopMedian;
    }
    const double fracAtLargest = rows.back().coopAboveThresholdFraction;

    Outcome out;
    out.pass = coopMonotone && noncoopMonotone && fracAtLargest >= 0.9;
    std::ostringstream os;
    os << "coop median " << rows.front().coopMedian << " -> " << rows.back().coopMedian
       << (coopMonotone ? " (monotone up)" : " (NOT monotone)") << "; noncoop "
       << rows.front().noncoopMedian << " -> " << rows.back().noncoopMedian
       << (noncoopMonotone ? " (monotone down)" : " (NOT monotone)") << "; above threshold at n="
       << rows.back().numUsers << ": " << 100.0 * fracAtLargest << "%";
    out.detail = os.str();
    return out;
}

Outcome criterion8_cooperationGain() {
    const auto& coop = g_runs.get(g_runs.coopKappa7, true, 7.0);
    const auto& base = g_runs.get(g_runs.baseline, false, 7.0);
    const double coopP05 = pool_throughput(coop).quantile(0.05);
    const double baseP05 = pool_throughput(base).quantile(0.05);
    const double ratio = coopP05 / baseP05;

    Outcome out;
    out.pass = ratio >= 1.5;
    std::ostringstream os;
    os << "5th-percentile throughput " << coopP05 << " vs " << baseP05 << " (ratio " << ratio
       << ", need >= 1.5)";
    out.detail = os.str();
    return out;
}

Outcome criterion9_relayingCost() {
    const auto& k7 = g_runs.get(g_runs.coopKappa7, true, 7.0);
    const auto& k0 = g_runs.get(g_runs.coopKappa0, true, 0.0);
    double load7 = 0.0, load0 = 0.0;
    for (const auto& d : k7)
        for (double b : d.relayFraction) load7 += b;
    for (const auto& d : k0)
        for (double b : d.relayFraction) load0 += b;
    const double drop = load0 > 0.0 ? 1.0 - load7 / load0 : 0.0;

    const double med7 = pool_throughput(k7).quantile(0.5);
    const double med0 = pool_throughput(k0).quantile(0.5);
    const double loss = 1.0 - med7 / med0;

    Outcome out;
    out.pass = drop >= 0.30 && loss <= 0.20;
    std::ostringstream os;
    os << "relaying load " << load0 << " -> " << load7 << " (drop " << 100.0 * drop
       << "%, need >= 30%); median throughput loss " << 100.0 * loss << "% (cap 20%)";
    out.detail = os.str();
    return out;
}

Outcome criterion10_oracleAgreements() {
    bool pass = true;
    std::ostringstream os;

    // closed-form top singular value vs numeric SVD
    {
        RandomStream rng(301);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int m = 2 + static_cast<int>(rng.integer(7));
            CVector a(m), b(m);
            for (int k = 0; k < m; ++k) {
                a(k) = rng.complexGaussian() * rng.uniform(0.1, 3.0);
                b(k) = rng.complexGaussian() * rng.uniform(0.1, 3.0);
            }
            CMatrix h(2, m);
            h.row(0) = a.adjoint();
            h.row(1) = b.adjoint();
            Eigen::JacobiSVD<CMatrix> svd(h);
            const double viaSvd = svd.singularValues()(0) * svd.singularValues()(0);
            const double closed = top_singular_closed_form(a, b);
            worst = std::max(worst, std::abs(closed - viaSvd) / std::max(viaSvd, 1e-300));
        }
        pass = pass && worst < 1e-9;
        os << "top-singular rel err " << worst << "; ";
    }

    // conditional variance vs the determinant-route residual
    {
        RandomStream rng(303);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::Matrix2cd a;
            a(0, 0) = rng.complexGaussian();
            a(0, 1) = rng.complexGaussian();
            a(1, 0) = rng.complexGaussian();
            a(1, 1) = rng.complexGaussian();
            const Eigen::Matrix2cd sigma =
                a * a.adjoint() + 0.02 * Eigen::Matrix2cd::Identity();
            const double viaDet = (sigma(0, 0) * sigma(1, 1) - sigma(0, 1) * sigma(1, 0)).real() /
                                  sigma(0, 0).real();
            worst = std::max(worst, std::abs(conditional_variance(sigma) - viaDet));
        }
        pass = pass && worst < 1e-9;
        os << "cond-var abs err " << worst << "; ";
    }

    // greedy/exhaustive sandwich on all small instances
    {
        long violations = 0;
        for (double kappa : {0.0, 1.0, 7.0}) {
            for (int variant = 0; variant < 2; ++variant) {
                const TableInstance inst = variant == 0 ? TableInstance::tinyTwoUser(kappa)
                                                        : TableInstance::tinyThreeUser(kappa);
                RandomStream rng(305 + variant);
                std::vector<TableRateModel> models;
                for (int k = 0; k < inst.numStates(); ++k) models.emplace_back(inst, k);
                for (int trial = 0; trial < 50; ++trial) {
                    std::vector<UserState> states = make_user_states(inst.numUsers);
                    for (auto& s : states) {
                        s.rateAvg = rng.uniform(0.05, 3.0);
                        s.relayAvg = rng.uniform(0.0, 0.7);
                    }
                    const int k = static_cast<int>(rng.integer(inst.numStates()));
                    CliqueStates c1 = make_clique_states(inst);
                    CliqueStates c2 = make_clique_states(inst);
                    CliqueStates c3 = make_clique_states(inst);
                    const int cap = models[k].maxStreams();
                    const auto greedy =
                        greedy_schedule(models[k], states, {kappa}, c1, 0.01, cap);
                    const auto ex = exhaustive_schedule(models[k], states, {kappa}, c2, cap);
                    const auto single = greedy_schedule(
                        models[k], states, {kappa}, c3,
                        std::numeric_limits<double>::infinity(), cap);
                    const double fG = objective_f(models[k], greedy, states, {kappa});
                    const double fE = objective_f(models[k], ex, states, {kappa});
                    const double fS = objective_f(models[k], single, states, {kappa});
                    if (!(fG <= fE + 1e-9 && fG >= fS - 1e-9)) ++violations;
                }
            }
        }
        pass = pass && violations == 0;
        os << "sandwich violations " << violations;
    }

    Outcome out;
    out.pass = pass;
    out.detail = os.str();
    return out;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int a = 1; a < argc; ++a)
        if (std::strcmp(argv[a], "--only") == 0 && a + 1 < argc) only = std::atoi(argv[a + 1]);

    const std::vector<Criterion> criteria = {
        {1, "capacity-gap", criterion1_capacityGap},
        {2, "stability-inner-bound", criterion2_stabilityInnerBound},
        {3, "scheduler-optimality", criterion3_schedulerOptimality},
        {4, "barrier-convergence", criterion4_barrierConvergence},
        {5, "relay-queue-stability", criterion5_relayQueueStability},
        {6, "fairness", criterion6_fairness},
        {7, "snr-scaling", criterion7_snrScaling},
        {8, "cooperation-gain", criterion8_cooperationGain},
        {9, "relaying-cost", criterion9_relayingCost},
        {10, "oracle-agreements", criterion10_oracleAgreements},
    };

    std::cout << std::setprecision(6);
    bool allPass = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        allPass = allPass && out.pass;
        std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " C" << c.id << ' ' << c.name << " ("
                  << std::fixed << std::setprecision(1) << secs << "s): "
                  << std::defaultfloat << std::setprecision(6) << out.detail << "\n";
        std::cout.flush();
    }
    return allPass ? 0 : 1;
}
