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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>

#include "coopsched/conflict.hpp"
#include "coopsched/phy.hpp"
#include "coopsched/reference.hpp"
#include "coopsched/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coopsched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

json loadJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

std::ofstream openOut(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << std::setprecision(12);
    return out;
}

int runSimulate(const std::string& configPath, const std::string& outDir, bool trace) {
    const SimConfig config = SimConfig::fromJson(loadJsonFile(configPath));
    fs::create_directories(outDir);

    std::vector<DropResult> results;
    if (trace && config.drops == 1) {
        auto traceFile = openOut(fs::path(outDir) / "trace.jsonl");
        std::vector<QueueTraceRow> queueRows;
        TraceSink sink = [&](const FrameRecord& rec) {
            json line;
            line["t"] = rec.frame;
            json sched = json::array();
            for (const StreamId& s : rec.schedule)
                sched.push_back({s.dest + 1, s.relay + 1, s.stream});
            line["schedule"] = sched;
            line["f_value"] = rec.fValue;
            line["eligible_pair_count"] = rec.eligiblePairCount;
            traceFile << line.dump() << "\n";
        };
        RandomStream root(config.net.rngSeed);
        results.push_back(run_drop(config, root.split(1000).seed(), 1000, sink, &queueRows));
        auto queueFile = openOut(fs::path(outDir) / "queue_trace.csv");
        queueFile << "t,i,j,Q,A,mu,B,J\n";
        for (const auto& r : queueRows)
            queueFile << r.frame << ',' << r.dest + 1 << ',' << r.relay + 1 << ',' << r.pending
                      << ',' << r.arrival << ',' << r.granted << ',' << r.available << ','
                      << r.interference << "\n";
    } else {
        if (trace) std::cerr << "trace output requires drops == 1; ignoring --trace\n";
        results = run_simulation(config);
    }

    const CdfSummary tput = pool_throughput(results);
    const CdfSummary relay = pool_relay_fraction(results);

    auto tputCsv = openOut(fs::path(outDir) / "throughput_cdf.csv");
    tputCsv << "rank,cdf,throughput_bps_hz\n";
    for (std::size_t i = 0; i < tput.values.size(); ++i)
        tputCsv << i << ',' << static_cast<double>(i + 1) / tput.values.size() << ','
                << tput.values[i] << "\n";

    auto relayCsv = openOut(fs::path(outDir) / "relay_cdf.csv");
    relayCsv << "rank,cdf,relay_fraction\n";
    for (std::size_t i = 0; i < relay.values.size(); ++i)
        relayCsv << i << ',' << static_cast<double>(i + 1) / relay.values.size() << ','
                 << relay.values[i] << "\n";

    auto histCsv = openOut(fs::path(outDir) / "stream_hist.csv");
    histCsv << "streams,frames\n";
    std::vector<long> hist;
    for (const auto& d : results) {
        if (hist.size() < d.streamCountHist.size()) hist.resize(d.streamCountHist.size(), 0);
        for (std::size_t k = 0; k < d.streamCountHist.size(); ++k)
            hist[k] += d.streamCountHist[k];
    }
    for (std::size_t k = 0; k < hist.size(); ++k) histCsv << k << ',' << hist[k] << "\n";

    bool driftOk = true;
    double meanStreams = 0.0;
    double maxLoad = 0.0;
    for (const auto& d : results) {
        driftOk = driftOk && d.driftRecursionOk;
        meanStreams += d.meanScheduledStreams / results.size();
        maxLoad = std::max(maxLoad, d.maxCliqueLoadAfterBurn);
    }

    json summary;
    summary["throughput"] = {{"p05", tput.quantile(0.05)},
                             {"median", tput.quantile(0.5)},
                             {"p95", tput.quantile(0.95)},
                             {"mean_scheduled_streams", meanStreams}};
    summary["relaying"] = {{"median", relay.quantile(0.5)},
                           {"p90", relay.quantile(0.9)},
                           {"total_load", [&] {
                                double s = 0.0;
                                for (double v : relay.values) s += v;
                                return s;
                            }()}};
    summary["stability"] = {{"drift_recursion_ok", driftOk},
                            {"max_clique_load_after_burn", maxLoad}};
    auto summaryFile = openOut(fs::path(outDir) / "summary.json");
    summaryFile << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";

    return driftOk ? kExitOk : kExitViolation;
}

int runGapCheck(long trials, std::uint64_t seed, const std::string& outPath) {
    RandomStream root(seed);
    std::ofstream csv;
    if (!outPath.empty()) {
        csv.open(outPath);
        csv << std::setprecision(12) << "seed,M,rMimo,cutset,gap\n";
    }
    const int antennaChoices[3] = {2, 4, 8};
    double maxGap = -1.0, minGap = 3.0;
    long violations = 0;
    for (long trial = 0; trial < trials; ++trial) {
        RandomStream rng = root.split(trial);
        const int m = antennaChoices[rng.integer(3)];
        CMatrix h(2, m);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < m; ++c) h(r, c) = rng.complexGaussian();
        // channel and side gains log-uniform over [-20, 20] dB
        h.row(0) *= std::pow(10.0, rng.uniform(-20.0, 20.0) / 20.0);
        h.row(1) *= std::pow(10.0, rng.uniform(-20.0, 20.0) / 20.0);
        const Complex g = std::polar(std::pow(10.0, rng.uniform(-20.0, 20.0) / 20.0),
                                     rng.uniform(0.0, 2.0 * M_PI));
        const RateReport rep = gap_check(h, g);
        maxGap = std::max(maxGap, rep.gap);
        minGap = std::min(minGap, rep.gap);
        if (rep.theoremViolated) ++violations;
        if (csv.is_open())
            csv << trial << ',' << m << ',' << rep.rMimo << ',' << rep.cutset << ',' << rep.gap
                << "\n";
    }
    std::cout << std::setprecision(12) << "trials=" << trials << " min_gap=" << minGap
              << " max_gap=" << maxGap << (violations == 0 ? " <= 2\n" : " VIOLATED\n");
    return violations == 0 ? kExitOk : kExitViolation;
}

int runScaling(const std::vector<int>& userCounts, int trials, const std::string& outPath,
               ScalingConfig config) {
    const auto rows = scaling_experiment(userCounts, trials, config);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!outPath.empty()) {
        file.open(outPath);
        file << std::setprecision(12);
        out = &file;
    }
    *out << "n,coop_median,noncoop_median,coop_threshold,noncoop_threshold,coop_above_frac\n";
    for (const auto& r : rows)
        *out << r.numUsers << ',' << r.coopMedian << ',' << r.noncoopMedian << ','
             << r.coopThreshold << ',' << r.noncoopThreshold << ','
             << r.coopAboveThresholdFraction << "\n";
    return kExitOk;
}

int runStabilityCheck(const std::string& graphPath) {
    const json j = loadJsonFile(graphPath);
    const int v = j.at("num_vertices").get<int>();
    SimpleGraph g(v);
    for (const auto& e : j.at("edges")) g.addEdge(e.at(0).get<int>(), e.at(1).get<int>());
    LoadVector load;
    for (const double b : j.at("beta").get<std::vector<double>>())
        load.beta.push_back(exactRational(b));
    for (const double p : j.at("availability").get<std::vector<double>>())
        load.availability.push_back(exactRational(p));
    if (static_cast<int>(load.beta.size()) != v || static_cast<int>(load.availability.size()) != v)
        throw ConfigError("beta and availability must have one entry per vertex");

    const ChordalCompletion completion = chordalize(g);
    const CliqueList cliques = maximal_cliques(completion);
    std::cout << "vertices=" << v << " edges=" << g.edgeCount()
              << " fill_in=" << completion.addedEdges.size()
              << " maximal_cliques=" << cliques.cliques.size() << "\n";
    bool member = true;
    for (std::size_t q = 0; q < cliques.cliques.size(); ++q) {
        const Rational lq = clique_load(load, cliques.cliques[q]);
        const bool ok = lq <= 1;
        member = member && ok;
        std::cout << "clique " << q << " size=" << cliques.cliques[q].size()
                  << " load=" << std::setprecision(10) << toDouble(lq)
                  << (ok ? " ok" : " violated") << "\n";
    }
    std::cout << "inner_bound_member=" << (member ? "true" : "false") << "\n";
    if (v <= 12) {
        const bool stable = stability_member_bruteforce(load, g);
        std::cout << "bruteforce_stable=" << (stable ? "true" : "false") << "\n";
        if (member && !stable) {
            std::cout << "containment VIOLATED\n";
            return kExitViolation;
        }
    }
    return kExitOk;
}

int runSolveRef(const std::string& problemPath, double barrier, double tol,
                const std::string& outPath) {
    const TableInstance instance = TableInstance::fromJson(loadJsonFile(problemPath));
    const SolveReport report = barrier > 0.0 ? solve_optn(instance, barrier, tol)
                                             : solve_opt3(instance, tol);
    const json out = report.toJson();
    if (!outPath.empty()) {
        auto f = openOut(outPath);
        f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int runOptimalityCert(const std::string& configPath, long frames, std::uint64_t seed) {
    TableInstance instance = TableInstance::tinyTwoUser();
    if (!configPath.empty()) instance = TableInstance::fromJson(loadJsonFile(configPath));

    CertificationConfig cc;
    cc.frames = frames;
    cc.seed = seed;
    cc.checkpoints = {100, 1000, 10000, frames};
    const CertificationResult res = certify_scheduler(instance, cc);

    std::cout << std::setprecision(10) << "OPT' = " << res.optPrime << "\n";
    for (const auto& [t, u] : res.utilityTrajectory)
        std::cout << "t=" << t << " U*(t)=" << u << " |U*-OPT'|=" << std::abs(u - res.optPrime)
                  << "\n";
    const double tolerance = 0.05 * std::max(1.0, std::abs(res.optPrime));
    const bool ok = res.finalGap <= tolerance;
    std::cout << "final_gap=" << res.finalGap << " tolerance=" << tolerance
              << (ok ? " PASS\n" : " FAIL\n");
    return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D2D-cooperative downlink scheduling simulator"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the frame-loop simulation");
    std::string simConfig, simOut = "out";
    bool simTrace = false;
    sim->add_option("--config", simConfig, "sim config JSON")->required();
    sim->add_option("--out", simOut, "output directory");
    sim->add_flag("--trace", simTrace, "write per-frame JSON-lines trace (drops == 1)");

    // gap-check
    auto* gap = app.add_subcommand("gap-check", "capacity-gap sweep for the cooperation scheme");
    long gapTrials = 1000;
    std::uint64_t gapSeed = 7;
    std::string gapOut;
    gap->add_option("--trials", gapTrials, "number of random instances");
    gap->add_option("--seed", gapSeed, "RNG seed");
    gap->add_option("--out", gapOut, "CSV output path");

    // scaling
    auto* scal = app.add_subcommand("scaling", "min-SNR scaling experiment");
    std::vector<int> scalN = {10, 50, 250, 1250};
    int scalTrials = 50;
    std::string scalOut;
    ScalingConfig scalCfg;
    scal->add_option("--n", scalN, "cluster sizes");
    scal->add_option("--trials", scalTrials, "trials per size");
    scal->add_option("--antennas", scalCfg.numAntennas, "base station antennas");
    scal->add_option("--rho", scalCfg.pathGain, "downlink path gain");
    scal->add_option("--paths", scalCfg.numPaths, "multipath components");
    scal->add_option("--gamma", scalCfg.gamma, "non-cooperative bound exponent");
    scal->add_option("--seed", scalCfg.seed, "RNG seed");
    scal->add_option("--out", scalOut, "CSV output path");

    // stability-check
    auto* stab = app.add_subcommand("stability-check", "clique loads and membership verdicts");
    std::string stabGraph;
    stab->add_option("--graph", stabGraph, "graph + load JSON")->required();

    // solve-ref
    auto* solve = app.add_subcommand("solve-ref", "reference utility-optimization solver");
    std::string solveProblem, solveOut;
    double solveBarrier = 0.0, solveTol = 1e-6;
    solve->add_option("--problem", solveProblem, "problem JSON")->required();
    solve->add_option("--barrier", solveBarrier, "barrier index (0 = hard constraints)");
    solve->add_option("--tol", solveTol, "Frank-Wolfe gap tolerance");
    solve->add_option("--out", solveOut, "report JSON path");

    // optimality-cert
    auto* cert = app.add_subcommand("optimality-cert", "empirical policy-vs-OPT' certification");
    std::string certConfig;
    long certFrames = 100000;
    std::uint64_t certSeed = 7;
    cert->add_option("--config", certConfig, "instance JSON (default: built-in two-user)");
    cert->add_option("--frames", certFrames, "simulation length");
    cert->add_option("--seed", certSeed, "RNG seed");

    try {
        app.parse(argc, argv);
        if (*sim) return runSimulate(simConfig, simOut, simTrace);
        if (*gap) return runGapCheck(gapTrials, gapSeed, gapOut);
        if (*scal) return runScaling(scalN, scalTrials, scalOut, scalCfg);
        if (*stab) return runStabilityCheck(stabGraph);
        if (*solve) return runSolveRef(solveProblem, solveBarrier, solveTol, solveOut);
        if (*cert) return runOptimalityCert(certConfig, certFrames, certSeed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
