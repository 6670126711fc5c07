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

#ifndef COOPSCHED_QUEUEING_HPP
#define COOPSCHED_QUEUEING_HPP

#include <span>

#include "coopsched/conflict.hpp"
#include "coopsched/rational.hpp"
#include "coopsched/types.hpp"

namespace coopsched {

/// Relay transmission queues Q_ij: pending slots of transmission at relay j
/// toward destination i. Diagonal unused.
struct QueueMatrix {
    IMatrix pending;
    long frame = 0;
};

QueueMatrix make_queues(int numUsers);

/// Per-pair service grant mu_ij and interference indicator J_ij for one
/// frame. The served set {mu J B = 1} is an independent set of the conflict
/// graph.
struct ServiceDecision {
    IMatrix granted;       ///< mu_ij
    IMatrix interference;  ///< J_ij
};

/// Q'_ij = max(Q_ij - B_ij J_ij mu_ij, 0) + A_ij.
QueueMatrix step_queues(const QueueMatrix& queues, const IMatrix& arrivals,
                        const IMatrix& available, const IMatrix& interference,
                        const IMatrix& granted);

/// Longest-queue-first greedy maximal independent set over pairs with
/// pending work and an available link; J_ij = 0 exactly for pairs conflicting
/// with a granted transmitter.
ServiceDecision mac_protocol(const QueueMatrix& queues, const ConflictGraph& conflict,
                             const IMatrix& available);

/// Exact running averages beta_ij(t) = (1/t) sum A_ij, kept as integer
/// counters over t.
struct ArrivalRecord {
    Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> counts;
    long frames = 0;

    Rational rate(int dest, int relay) const {
        if (frames == 0) return Rational(0);
        return Rational(counts(dest, relay), frames);
    }
};

ArrivalRecord make_arrival_record(int numUsers);

/// Fold one frame of arrivals into the record (advances t).
void record_arrivals(ArrivalRecord& record, const IMatrix& arrivals);

/// Check a clique-load trace against the one-step drift recursion
///   beta_Q(t) <= (t-1)/t beta_Q(t-1) + |Q| / (t p_min) * 1{beta_Q(t-1) <= 1}
/// plus the limsup proxy max_{t > burnIn} beta_Q(t) <= 1 + |Q|/(burnIn p_min).
/// The indicator is closed at the boundary, matching the closed stability
/// region used by the flow control. `slack` absorbs floating-point rounding
/// of series produced by exact-rational simulations.
bool drift_bound_check(std::span<const double> cliqueLoadSeries, int cliqueSize, double pMin,
                       long burnIn = 0, double slack = 1e-12);

}  // namespace coopsched

#endif
