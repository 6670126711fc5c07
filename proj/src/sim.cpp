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

#include "coopsched/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "coopsched/phy.hpp"
#include "coopsched/phy_model.hpp"

namespace coopsched {

using nlohmann::json;

void SimConfig::validate() const {
    net.validate();
    if (frames < ewmaWindow) throw ConfigError("frames must be >= ewma_window");
    if (drops < 1) throw ConfigError("drops must be >= 1");
    if (maxStreams < 1) throw ConfigError("max_streams must be >= 1");
    if (kappa < 0.0) throw ConfigError("kappa must be nonnegative");
    if (estimationErrorScale < 0.0) throw ConfigError("estimation_error_scale must be >= 0");
    if (fadingGridSize < 1) throw ConfigError("fading_grid_size must be >= 1");
    if (scheduler == SchedulerKind::Greedy && !(greedyEps > 0.0))
        throw ConfigError("greedy_eps must be positive");
    if (downlinkExponent < 0.0) throw ConfigError("downlink_exp must be >= 0");
    if (downlinkShadowingDb < 0.0) throw ConfigError("downlink_shadow_db must be >= 0");
}

SimConfig SimConfig::fromJson(const json& j) {
    static const std::set<std::string> known = {
        "net",           "frames",      "ewma_window",        "kappa",
        "greedy_eps",    "max_streams", "scheduler",          "barrier_index",
        "estimation_error_scale",       "snr_backoff_db",     "drops",
        "interference_floor_db",        "cooperation",        "fading_grid_size",
        "downlink_exp",                 "downlink_shadow_db"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown sim config key: " + it.key());

    SimConfig c;
    try {
        c.net = NetworkConfig::fromJson(j.at("net"));
        c.frames = j.at("frames").get<long>();
        c.ewmaWindow = j.value("ewma_window", 50);
        c.kappa = j.value("kappa", 7.0);
        c.greedyEps = j.value("greedy_eps", 0.02);
        c.maxStreams = j.value("max_streams", c.net.numAntennas);
        const std::string kind = j.value("scheduler", std::string("greedy"));
        if (kind == "greedy")
            c.scheduler = SchedulerKind::Greedy;
        else if (kind == "exhaustive")
            c.scheduler = SchedulerKind::Exhaustive;
        else if (kind == "barrier")
            c.scheduler = SchedulerKind::Barrier;
        else
            throw ConfigError("scheduler must be greedy, exhaustive or barrier");
        c.barrierIndex = j.value("barrier_index", 200.0);
        c.estimationErrorScale = j.value("estimation_error_scale", 0.0);
        c.snrBackoffDb = j.value("snr_backoff_db", 3.0);
        c.drops = j.value("drops", 4);
        c.interferenceFloorDb = j.value("interference_floor_db", 0.0);
        c.cooperation = j.value("cooperation", true);
        c.fadingGridSize = j.value("fading_grid_size", 16);
        c.downlinkExponent = j.value("downlink_exp", 3.5);
        c.downlinkShadowingDb = j.value("downlink_shadow_db", 8.0);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad sim config: ") + e.what());
    }
    c.validate();
    return c;
}

json SimConfig::toJson() const {
    json j;
    j["net"] = net.toJson();
    j["frames"] = frames;
    j["ewma_window"] = ewmaWindow;
    j["kappa"] = kappa;
    j["greedy_eps"] = greedyEps;
    j["max_streams"] = maxStreams;
    j["scheduler"] = scheduler == SchedulerKind::Greedy
                         ? "greedy"
                         : (scheduler == SchedulerKind::Exhaustive ? "exhaustive" : "barrier");
    j["barrier_index"] = barrierIndex;
    j["estimation_error_scale"] = estimationErrorScale;
    j["snr_backoff_db"] = snrBackoffDb;
    j["drops"] = drops;
    j["interference_floor_db"] = interferenceFloorDb;
    j["cooperation"] = cooperation;
    j["fading_grid_size"] = fadingGridSize;
    j["downlink_exp"] = downlinkExponent;
    j["downlink_shadow_db"] = downlinkShadowingDb;
    return j;
}

namespace {

std::vector<StreamId> buildCandidates(const SimConfig& config, const RMatrix& pathloss) {
    std::vector<StreamId> out;
    const int n = config.net.numUsers;
    for (int i = 0; i < n; ++i) out.push_back({i, i, 1});
    if (config.cooperation)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j || pathloss(i, j) <= config.net.connectThreshold) continue;
                out.push_back({i, j, 1});
                out.push_back({i, j, 2});
            }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

DropResult run_drop(const SimConfig& config, std::uint64_t dropSeed, long driftBurnIn,
                    TraceSink trace, std::vector<QueueTraceRow>* queueTrace) {
    config.validate();
    const NetworkConfig& net = config.net;
    const int n = net.numUsers;

    RandomStream root(dropSeed);
    RandomStream rngGeom = root.split(1);
    RandomStream rngChan = root.split(2);
    RandomStream rngEst = root.split(3);

    const Geometry geometry = place_users(net, rngGeom);
    const RMatrix pathloss = pathloss_matrix(geometry, net);

    // Per-cluster downlink gain from the cluster-center distance to the
    // base station at the origin. Constant within a cluster; distances are
    // clamped below a tenth of the cell radius.
    std::vector<double> userGain(n, 1.0);
    if (config.downlinkExponent > 0.0) {
        const double refDist = net.cellRadius / 2.0;
        for (int u = 0; u < n; ++u) {
            const double d = std::max(geometry.clusterCenters[geometry.userCluster[u]].norm(),
                                      net.cellRadius / 10.0);
            userGain[u] = std::pow(refDist / d, config.downlinkExponent);
        }
    }
    if (config.downlinkShadowingDb > 0.0)
        for (int u = 0; u < n; ++u)
            userGain[u] *= std::pow(10.0, config.downlinkShadowingDb * rngGeom.gaussian() / 10.0);
    const ConnectivityGraph connectivity = build_connectivity(pathloss, net.connectThreshold);
    const ConflictGraph conflict = build_conflict(connectivity);
    const ChordalCompletion completion = chordalize(conflict.graph);
    const CliqueList cliques = maximal_cliques(completion);

    std::vector<Rational> availability(conflict.pairs.count());
    for (int v = 0; v < conflict.pairs.count(); ++v) {
        const auto [i, j] = conflict.pairs.pair(v);
        availability[v] = exactRational(net.availability(i, j));
    }
    CliqueStates cliqueStates(cliques, conflict.pairs, availability);

    const int numCliques = static_cast<int>(cliques.cliques.size());
    std::vector<Rational> prevWeighted(numCliques, Rational(0));
    std::vector<Rational> deltaCap(numCliques), loadCap(numCliques), minAvail(numCliques);
    for (int q = 0; q < numCliques; ++q) {
        Rational pmin(1);
        for (int v : cliques.cliques[q]) pmin = std::min(pmin, availability[v]);
        minAvail[q] = pmin;
        const Rational size(static_cast<long>(cliques.cliques[q].size()));
        deltaCap[q] = size / pmin;
        loadCap[q] = Rational(1) + size / (Rational(driftBurnIn) * pmin);
    }

    std::vector<UserState> userStates = make_user_states(n);
    QueueMatrix queues = make_queues(n);
    const FadingGrid grid = FadingGrid::exponentialQuantiles(config.fadingGridSize);
    const double noiseFloor = std::pow(10.0, config.interferenceFloorDb / 10.0);
    const UtilityParams params{config.kappa};
    const std::vector<StreamId> candidates = buildCandidates(config, pathloss);

    DropResult result;
    result.burnIn = driftBurnIn;
    result.streamCountHist.assign(config.maxStreams + 1, 0);
    std::vector<double> deliveredSum(n, 0.0);
    std::vector<long> relayFrames(n, 0);
    long streamTotal = 0;

    const bool scaleGains = config.downlinkExponent > 0.0 || config.downlinkShadowingDb > 0.0;
    for (long t = 1; t <= config.frames; ++t) {
        ChannelState chan = draw_channel_state(net, geometry, t, rngChan);
        if (scaleGains)
            for (int u = 0; u < n; ++u) chan.downlink[u] *= std::sqrt(userGain[u]);

        // Base-station estimate: additive noise, per-antenna variance
        // scale * ||h||^2 / M.
        std::vector<CVector> estimate = chan.downlink;
        if (config.estimationErrorScale > 0.0) {
            for (int u = 0; u < n; ++u) {
                const double sd = std::sqrt(config.estimationErrorScale *
                                            chan.downlink[u].squaredNorm() / net.numAntennas);
                for (int a = 0; a < net.numAntennas; ++a)
                    estimate[u](a) += sd * rngEst.complexGaussian();
            }
        }

        const PhyRateModel model(estimate, pathloss, candidates, &grid, config.snrBackoffDb,
                                 noiseFloor, net.numAntennas);

        ScheduleSet schedule;
        switch (config.scheduler) {
            case SchedulerKind::Exhaustive:
                schedule = exhaustive_schedule(model, userStates, params, cliqueStates,
                                               config.maxStreams);
                break;
            case SchedulerKind::Greedy:
                schedule = greedy_schedule(model, userStates, params, cliqueStates,
                                           config.greedyEps, config.maxStreams);
                break;
            case SchedulerKind::Barrier:
                schedule = greedy_barrier_schedule(model, userStates, params, cliqueStates,
                                                   config.barrierIndex, config.greedyEps,
                                                   config.maxStreams);
                break;
        }

        // Delivery on the true channels with the frame's fading draw, under
        // the precoder the base station actually chose.
        std::vector<double> delivered(n, 0.0);
        if (!schedule.empty()) {
            PairChannels truth;
            truth.downlink = &chan.downlink;
            truth.pathloss = &pathloss;
            truth.fading = &chan.fading;
            const auto streamsTrue = virtual_channels(schedule, truth);
            const CMatrix w = model.precoderFor(schedule);
            const auto rates = precoded_stream_rates(streamsTrue, w, config.snrBackoffDb,
                                                     nullptr, noiseFloor);
            for (std::size_t s = 0; s < schedule.size(); ++s)
                delivered[schedule[s].dest] += rates[s];
        }

        IMatrix arrivals = IMatrix::Zero(n, n);
        std::vector<bool> relayed(n, false);
        for (const StreamId& s : schedule)
            if (!s.selfPair()) {
                arrivals(s.dest, s.relay) = 1;
                relayed[s.relay] = true;
            }

        if (trace) {
            FrameRecord rec;
            rec.frame = t;
            rec.schedule = schedule;
            rec.fValue = objective_f(model, schedule, userStates, params);
            rec.eligiblePairCount = 0;
            for (int v = 0; v < conflict.pairs.count(); ++v)
                if (cliqueStates.pairEligible(v)) ++rec.eligiblePairCount;
            rec.deliveredRate = delivered;
            trace(rec);
        }

        // Intra-D2D MAC and queue evolution.
        const ServiceDecision service = mac_protocol(queues, conflict, chan.available);
        if (queueTrace) {
            for (int v = 0; v < conflict.pairs.count(); ++v) {
                const auto [i, j] = conflict.pairs.pair(v);
                if (queues.pending(i, j) == 0 && arrivals(i, j) == 0) continue;
                queueTrace->push_back({t, i, j, queues.pending(i, j), arrivals(i, j),
                                       service.granted(i, j), chan.available(i, j),
                                       service.interference(i, j)});
            }
        }
        queues = step_queues(queues, arrivals, chan.available, service.interference,
                             service.granted);

        update_user_states(userStates, delivered, relayed, t, AveragingMode::Ewma,
                           config.ewmaWindow);

        // Exact drift recursion on the touched cliques:
        //   W(t) <= W(t-1) + |Q|/p_min when the previous load was <= 1,
        //   W(t) = W(t-1) otherwise.
        bool sweep = (t == driftBurnIn + 1);
        for (int q = 0; q < numCliques; ++q) {
            const Rational& w = cliqueStates.weightedCount(q);
            const bool touched = w != prevWeighted[q];
            if (touched) {
                const bool indicator = prevWeighted[q] <= Rational(t - 1);
                const Rational allowed = indicator ? deltaCap[q] : Rational(0);
                if (w - prevWeighted[q] > allowed) result.driftRecursionOk = false;
                prevWeighted[q] = w;
            }
            if (t > driftBurnIn && (touched || sweep)) {
                if (w > loadCap[q] * Rational(t)) result.driftRecursionOk = false;
                const double load = toDouble(w) / static_cast<double>(t);
                result.maxCliqueLoadAfterBurn = std::max(result.maxCliqueLoadAfterBurn, load);
            }
        }

        for (int u = 0; u < n; ++u) {
            deliveredSum[u] += delivered[u];
            if (relayed[u]) ++relayFrames[u];
        }
        const int scheduled = static_cast<int>(schedule.size());
        if (scheduled < static_cast<int>(result.streamCountHist.size()))
            ++result.streamCountHist[scheduled];
        streamTotal += scheduled;
    }

    result.throughput.resize(n);
    result.relayFraction.resize(n);
    for (int u = 0; u < n; ++u) {
        result.throughput[u] = deliveredSum[u] / config.frames;
        result.relayFraction[u] = static_cast<double>(relayFrames[u]) / config.frames;
    }
    result.meanScheduledStreams = static_cast<double>(streamTotal) / config.frames;
    return result;
}

std::vector<DropResult> run_simulation(const SimConfig& config, long driftBurnIn) {
    config.validate();
    const int drops = config.drops;
    std::vector<DropResult> results(drops);

    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COOPSCHED_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) workers = parsed;
    }
    workers = std::clamp(workers, 1, drops);

    RandomStream root(config.net.rngSeed);
    std::vector<std::uint64_t> dropSeeds(drops);
    for (int d = 0; d < drops; ++d) dropSeeds[d] = root.split(1000 + d).seed();

    if (workers == 1) {
        for (int d = 0; d < drops; ++d) results[d] = run_drop(config, dropSeeds[d], driftBurnIn);
        return results;
    }

    std::atomic<int> next{0};
    std::exception_ptr firstError;
    std::mutex errorMutex;
    auto worker = [&]() {
        for (;;) {
            const int d = next.fetch_add(1);
            if (d >= drops) return;
            try {
                results[d] = run_drop(config, dropSeeds[d], driftBurnIn);
            } catch (...) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (!firstError) firstError = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (firstError) std::rethrow_exception(firstError);
    return results;
}

double CdfSummary::quantile(double q) const {
    if (values.empty()) throw std::invalid_argument("empty sample");
    if (q <= 0.0) return values.front();
    if (q >= 1.0) return values.back();
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - lo;
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

CdfSummary CdfSummary::of(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    return CdfSummary{std::move(samples)};
}

CdfSummary pool_throughput(const std::vector<DropResult>& drops) {
    std::vector<double> pool;
    for (const auto& d : drops) pool.insert(pool.end(), d.throughput.begin(), d.throughput.end());
    return CdfSummary::of(std::move(pool));
}

CdfSummary pool_relay_fraction(const std::vector<DropResult>& drops) {
    std::vector<double> pool;
    for (const auto& d : drops)
        pool.insert(pool.end(), d.relayFraction.begin(), d.relayFraction.end());
    return CdfSummary::of(std::move(pool));
}

double scaling_psi(int l) { return std::exp(std::lgamma(l + 1.0) / l); }

std::vector<ScalingRow> scaling_experiment(const std::vector<int>& userCounts, int trials,
                                           const ScalingConfig& config) {
    std::vector<ScalingRow> rows;
    const FadingGrid grid = FadingGrid::exponentialQuantiles(config.fadingGridSize);

    NetworkConfig chanCfg;
    chanCfg.numUsers = 1;
    chanCfg.numAntennas = config.numAntennas;
    chanCfg.pathGain = config.pathGain;
    chanCfg.numPaths = config.numPaths;
    chanCfg.antennaSpacing = config.antennaSpacing;
    chanCfg.d2dRefGain = config.d2dRefGain;
    chanCfg.d2dExponent = config.d2dExponent;
    chanCfg.setUniformAvailability(1.0);

    RandomStream root(config.seed);
    for (const int n : userCounts) {
        if (n < 3) throw std::invalid_argument("scaling experiment needs n >= 3");
        std::vector<double> coopMins, noncoopMins;
        coopMins.reserve(trials);
        noncoopMins.reserve(trials);

        const double coopThreshold =
            0.5 * config.numAntennas * config.pathGain *
                (0.5 * std::log(n) - 2.0 * std::log(std::log(n))) -
            1.0;
        int aboveThreshold = 0;

        for (int trial = 0; trial < trials; ++trial) {
            RandomStream rng = root.split(static_cast<std::uint64_t>(n) * 100003 + trial);

            // Single cluster: users uniform on a disc of the cluster radius.
            std::vector<Eigen::Vector2d> pos(n);
            for (int u = 0; u < n; ++u) {
                const double r = config.clusterRadius * std::sqrt(rng.uniform());
                const double ang = rng.uniform(0.0, 2.0 * M_PI);
                pos[u] = {r * std::cos(ang), r * std::sin(ang)};
            }
            RMatrix phi = RMatrix::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double d = (pos[i] - pos[j]).norm();
                    phi(i, j) = phi(j, i) = d2d_pathloss(d, chanCfg);
                }

            std::vector<CVector> h(n);
            for (int u = 0; u < n; ++u) h[u] = downlink_channel(chanCfg, rng);

            double coopMin = std::numeric_limits<double>::infinity();
            double noncoopMin = std::numeric_limits<double>::infinity();
            std::vector<int> candidates(n - 1);
            for (int i = 0; i < n; ++i) {
                int c = 0;
                for (int j = 0; j < n; ++j)
                    if (j != i) candidates[c++] = j;
                const SnrMetrics m = snr_metrics(i, candidates, h, phi, grid);
                noncoopMin = std::min(noncoopMin, m.noncoopSnr);
                // Conditional-mean SNR of the selected relay: the same
                // quantity the selection maximizes. The base station never
                // sees the side-channel fading, so this is the demodulation
                // SNR it can plan for.
                const double coop = m.bestRelay >= 0 ? m.coopSnrPerRelay[m.bestRelay]
                                                     : m.noncoopSnr;
                coopMin = std::min(coopMin, coop);
            }
            coopMins.push_back(coopMin);
            noncoopMins.push_back(noncoopMin);
            if (coopMin >= coopThreshold) ++aboveThreshold;
        }

        std::sort(coopMins.begin(), coopMins.end());
        std::sort(noncoopMins.begin(), noncoopMins.end());
        ScalingRow row;
        row.numUsers = n;
        row.coopMedian = coopMins[trials / 2];
        row.noncoopMedian = noncoopMins[trials / 2];
        row.coopThreshold = coopThreshold;
        row.noncoopThreshold = config.numAntennas * config.pathGain *
                               std::pow(n, -config.gamma / (2.0 * config.numPaths)) *
                               scaling_psi(2 * config.numPaths);
        row.coopAboveThresholdFraction = static_cast<double>(aboveThreshold) / trials;
        rows.push_back(row);
    }
    return rows;
}

namespace {

int sampleIndex(const std::vector<double>& probs, RandomStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

double empiricalUtility(const std::vector<UserState>& states, const UtilityParams& params) {
    double u = 0.0;
    for (const auto& s : states) {
        if (s.rateAvg <= 0.0 || s.relayAvg >= 1.0)
            return -std::numeric_limits<double>::infinity();
        u += std::log(s.rateAvg) + params.kappa * std::log1p(-s.relayAvg);
    }
    return u;
}

}  // namespace

CertificationResult certify_scheduler(const TableInstance& instance,
                                      const CertificationConfig& config) {
    CertificationResult out;
    const SolveReport ref = solve_opt3(instance, config.fwTol, config.maxSolverIterations);
    out.optPrime = ref.optValue;

    const UtilityParams params{instance.kappa};
    std::vector<UserState> states = make_user_states(instance.numUsers);
    CliqueStates cliqueStates = make_clique_states(instance);
    RandomStream rng(config.seed);

    std::vector<TableRateModel> models;
    for (int k = 0; k < instance.numStates(); ++k) models.emplace_back(instance, k);

    std::vector<double> delivered(instance.numUsers);
    std::vector<bool> relayed(instance.numUsers);
    auto checkpoint = config.checkpoints.begin();

    for (long t = 1; t <= config.frames; ++t) {
        const int k = sampleIndex(instance.stateProbs, rng);
        const int z = sampleIndex(instance.fadingProbs, rng);
        const ScheduleSet schedule = exhaustive_schedule(models[k], states, params, cliqueStates,
                                                         models[k].maxStreams());
        const int setIdx = instance.setIndex(schedule);
        for (int i = 0; i < instance.numUsers; ++i)
            delivered[i] = instance.userRates[i][setIdx][k][z];
        const auto relayFlags = instance.relaysOf(setIdx);
        for (int i = 0; i < instance.numUsers; ++i) relayed[i] = relayFlags[i];
        update_user_states(states, delivered, relayed, t, AveragingMode::Running);

        if (checkpoint != config.checkpoints.end() && t == *checkpoint) {
            out.utilityTrajectory.emplace_back(t, empiricalUtility(states, params));
            ++checkpoint;
        }
    }
    out.finalUtility = empiricalUtility(states, params);
    out.finalGap = std::abs(out.finalUtility - out.optPrime);
    return out;
}

TraceCompareResult compare_barrier_flow_traces(const TableInstance& instance, long frames,
                                               std::uint64_t seed, double barrierIndex) {
    TraceCompareResult out;
    const UtilityParams params{instance.kappa};

    std::vector<TableRateModel> models;
    for (int k = 0; k < instance.numStates(); ++k) models.emplace_back(instance, k);

    RandomStream rng(seed);
    std::vector<int> stateSeq(frames), fadingSeq(frames);
    for (long t = 0; t < frames; ++t) {
        stateSeq[t] = sampleIndex(instance.stateProbs, rng);
        fadingSeq[t] = sampleIndex(instance.fadingProbs, rng);
    }

    std::vector<UserState> flowStates = make_user_states(instance.numUsers);
    std::vector<UserState> barrierStates = make_user_states(instance.numUsers);
    CliqueStates flowCliques = make_clique_states(instance);
    CliqueStates barrierCliques = make_clique_states(instance);

    std::vector<double> delivered(instance.numUsers);
    std::vector<bool> relayed(instance.numUsers);

    for (long t = 1; t <= frames; ++t) {
        const int k = stateSeq[t - 1];
        const int z = fadingSeq[t - 1];

        const ScheduleSet flowSet = exhaustive_schedule(models[k], flowStates, params,
                                                        flowCliques, models[k].maxStreams());
        const ScheduleSet barrierSet =
            exhaustive_barrier_schedule(models[k], barrierStates, params, barrierCliques,
                                        barrierIndex, models[k].maxStreams());
        if (flowCliques.anyBoundaryExact() || barrierCliques.anyBoundaryExact())
            out.boundaryHit = true;
        if (flowSet != barrierSet && out.identical) {
            out.identical = false;
            out.firstDivergence = t;
        }

        const auto advance = [&](const ScheduleSet& set, std::vector<UserState>& states) {
            const int setIdx = instance.setIndex(set);
            for (int i = 0; i < instance.numUsers; ++i)
                delivered[i] = instance.userRates[i][setIdx][k][z];
            const auto relayFlags = instance.relaysOf(setIdx);
            for (int i = 0; i < instance.numUsers; ++i) relayed[i] = relayFlags[i];
            update_user_states(states, delivered, relayed, t, AveragingMode::Running);
        };
        advance(flowSet, flowStates);
        advance(barrierSet, barrierStates);
    }
    return out;
}

}  // namespace coopsched
