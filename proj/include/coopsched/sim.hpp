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

#ifndef COOPSCHED_SIM_HPP
#define COOPSCHED_SIM_HPP

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "coopsched/netmodel.hpp"
#include "coopsched/queueing.hpp"
#include "coopsched/reference.hpp"
#include "coopsched/scheduler.hpp"

namespace coopsched {

enum class SchedulerKind { Exhaustive, Greedy, Barrier };

struct SimConfig {
    NetworkConfig net;
    long frames = 5000;
    int ewmaWindow = 50;
    double kappa = 7.0;
    double greedyEps = 0.02;
    int maxStreams = 8;
    SchedulerKind scheduler = SchedulerKind::Greedy;
    double barrierIndex = 200.0;         ///< used by SchedulerKind::Barrier
    double estimationErrorScale = 0.0;   ///< CSI error variance scale
    double snrBackoffDb = 3.0;
    int drops = 4;
    double interferenceFloorDb = 0.0;    ///< noise-floor increment for other cells
    bool cooperation = true;             ///< false: plain MU-MIMO baseline
    int fadingGridSize = 16;

    /// Downlink large-scale exponent: each cluster's path gain is
    /// rho * (d_ref / d_cluster)^downlinkExponent with d_ref = cellRadius/2
    /// (gain is constant within a cluster, which sits far from the base
    /// station relative to its own radius). Zero disables the scaling.
    double downlinkExponent = 3.5;

    /// Per-user downlink log-normal shadowing std in dB, drawn once per drop.
    /// This is what separates cell-edge users from their cluster mates; with
    /// it at zero, users in one cluster are statistically identical and
    /// relaying can only harvest small-scale diversity.
    double downlinkShadowingDb = 8.0;

    void validate() const;
    static SimConfig fromJson(const nlohmann::json& j);
    nlohmann::json toJson() const;
};

/// Per-frame trace record (JSON-lines export).
struct FrameRecord {
    long frame = 0;
    ScheduleSet schedule;
    double fValue = 0.0;
    int eligiblePairCount = 0;
    std::vector<double> deliveredRate;
};

using TraceSink = std::function<void(const FrameRecord&)>;

/// Queue trace row for CSV export.
struct QueueTraceRow {
    long frame;
    int dest, relay;
    int pending, arrival, granted, available, interference;
};

struct DropResult {
    std::vector<double> throughput;       ///< final running mean per user
    std::vector<double> relayFraction;    ///< final running relay fraction per user
    std::vector<long> streamCountHist;    ///< histogram of |S(t)|
    double meanScheduledStreams = 0.0;
    bool driftRecursionOk = true;         ///< exact drift check over all cliques/frames
    double maxCliqueLoadAfterBurn = 0.0;  ///< max beta_Q(t) over t > burnIn
    long burnIn = 0;
};

/// One drop: fixed geometry, sequential frame loop. Deterministic in
/// (config, dropSeed).
DropResult run_drop(const SimConfig& config, std::uint64_t dropSeed, long driftBurnIn = 1000,
                    TraceSink trace = nullptr,
                    std::vector<QueueTraceRow>* queueTrace = nullptr);

/// All drops, parallel workers (COOPSCHED_THREADS overrides the count).
std::vector<DropResult> run_simulation(const SimConfig& config, long driftBurnIn = 1000);

/// Sorted pooled sample with interpolated quantiles.
struct CdfSummary {
    std::vector<double> values;  ///< sorted ascending

    double quantile(double q) const;
    static CdfSummary of(std::vector<double> samples);
};

CdfSummary pool_throughput(const std::vector<DropResult>& drops);
CdfSummary pool_relay_fraction(const std::vector<DropResult>& drops);

/// Min-SNR scaling experiment over cluster sizes (single cluster, one
/// scheduled pair, relay selection by expected cooperative SNR).
struct ScalingConfig {
    int numAntennas = 8;
    double pathGain = 1.0;
    int numPaths = 2;
    double antennaSpacing = 0.5;
    double clusterRadius = 25.0;  ///< users uniform on a disc of this radius [m]
    double d2dRefGain = 1e8;
    double d2dExponent = 3.5;
    double gamma = 0.5;  ///< exponent parameter of the non-cooperative bound
    int fadingGridSize = 16;
    std::uint64_t seed = 1;
};

struct ScalingRow {
    int numUsers = 0;
    double coopMedian = 0.0;
    double noncoopMedian = 0.0;
    double coopThreshold = 0.0;     ///< 0.5 M rho (0.5 ln n - 2 ln ln n) - 1
    double noncoopThreshold = 0.0;  ///< M rho n^(-gamma/2P) (2P)!^(1/2P)
    double coopAboveThresholdFraction = 0.0;
};

std::vector<ScalingRow> scaling_experiment(const std::vector<int>& userCounts, int trials,
                                           const ScalingConfig& config);

/// psi(l) = (l!)^(1/l), the factorial factor in the non-cooperative bound.
double scaling_psi(int l);

/// Table-driven policy certification: run the exhaustive flow-controlled
/// policy on a finite-alphabet instance, tracking the empirical utility
/// against the reference optimum.
struct CertificationConfig {
    long frames = 100000;
    std::uint64_t seed = 7;
    double fwTol = 1e-6;
    long maxSolverIterations = 5000000;
    std::vector<long> checkpoints = {100, 1000, 10000, 100000};
};

struct CertificationResult {
    double optPrime = 0.0;
    std::vector<std::pair<long, double>> utilityTrajectory;  ///< (t, U*(t))
    double finalUtility = 0.0;
    double finalGap = 0.0;  ///< |U*(T) - OPT'|
};

CertificationResult certify_scheduler(const TableInstance& instance,
                                      const CertificationConfig& config);

/// Run the flow-controlled and barrier policies on the same state sequence
/// and compare schedules frame by frame.
struct TraceCompareResult {
    bool identical = true;
    long firstDivergence = -1;
    bool boundaryHit = false;  ///< some clique load hit 1 exactly during the run
};

TraceCompareResult compare_barrier_flow_traces(const TableInstance& instance, long frames,
                                               std::uint64_t seed, double barrierIndex);

}  // namespace coopsched

#endif
