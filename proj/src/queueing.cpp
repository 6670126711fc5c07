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

#include "coopsched/queueing.hpp"

#include <algorithm>

namespace coopsched {

QueueMatrix make_queues(int numUsers) {
    QueueMatrix q;
    q.pending = IMatrix::Zero(numUsers, numUsers);
    q.frame = 0;
    return q;
}

QueueMatrix step_queues(const QueueMatrix& queues, const IMatrix& arrivals,
                        const IMatrix& available, const IMatrix& interference,
                        const IMatrix& granted) {
    QueueMatrix next;
    next.frame = queues.frame + 1;
    const int n = static_cast<int>(queues.pending.rows());
    next.pending = IMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int served = available(i, j) * interference(i, j) * granted(i, j);
            next.pending(i, j) = std::max(queues.pending(i, j) - served, 0) + arrivals(i, j);
        }
    return next;
}

ServiceDecision mac_protocol(const QueueMatrix& queues, const ConflictGraph& conflict,
                             const IMatrix& available) {
    const int n = static_cast<int>(queues.pending.rows());
    ServiceDecision d;
    d.granted = IMatrix::Zero(n, n);
    d.interference = IMatrix::Ones(n, n);

    // Longest-queue-first over servable pairs; ties by pair index so replays
    // are deterministic.
    struct Entry {
        int backlog, pairIdx, dest, relay;
    };
    std::vector<Entry> pending;
    for (int u = 0; u < conflict.pairs.count(); ++u) {
        const auto [i, j] = conflict.pairs.pair(u);
        if (queues.pending(i, j) > 0 && available(i, j) == 1)
            pending.push_back({queues.pending(i, j), u, i, j});
    }
    std::sort(pending.begin(), pending.end(), [](const Entry& a, const Entry& b) {
        return a.backlog != b.backlog ? a.backlog > b.backlog : a.pairIdx < b.pairIdx;
    });

    std::vector<int> selected;
    for (const Entry& e : pending) {
        bool blocked = false;
        for (int s : selected)
            if (conflict.graph.hasEdge(e.pairIdx, s)) {
                blocked = true;
                break;
            }
        if (!blocked) {
            selected.push_back(e.pairIdx);
            d.granted(e.dest, e.relay) = 1;
        }
    }

    // J_ij = 0 exactly for pairs conflicting with a granted transmitter.
    for (int u = 0; u < conflict.pairs.count(); ++u) {
        const auto [i, j] = conflict.pairs.pair(u);
        for (int s : selected)
            if (s != u && conflict.graph.hasEdge(u, s)) {
                d.interference(i, j) = 0;
                break;
            }
    }
    return d;
}

ArrivalRecord make_arrival_record(int numUsers) {
    ArrivalRecord r;
    r.counts = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>::Zero(numUsers, numUsers);
    r.frames = 0;
    return r;
}

void record_arrivals(ArrivalRecord& record, const IMatrix& arrivals) {
    record.counts += arrivals.cast<long>();
    record.frames += 1;
}

bool drift_bound_check(std::span<const double> cliqueLoadSeries, int cliqueSize, double pMin,
                       long burnIn, double slack) {
    const long len = static_cast<long>(cliqueLoadSeries.size());
    if (pMin <= 0.0) throw std::invalid_argument("pMin must be positive");

    // Series is indexed from t = 1.
    for (long idx = 1; idx < len; ++idx) {
        const double prev = cliqueLoadSeries[idx - 1];
        const double cur = cliqueLoadSeries[idx];
        const double t = static_cast<double>(idx + 1);
        double bound = (t - 1.0) / t * prev;
        if (prev <= 1.0 + slack) bound += cliqueSize / (t * pMin);
        if (cur > bound + slack) return false;
    }
    if (burnIn > 0 && len > burnIn) {
        const double cap = 1.0 + cliqueSize / (static_cast<double>(burnIn) * pMin);
        for (long idx = burnIn; idx < len; ++idx)
            if (cliqueLoadSeries[idx] > cap + slack) return false;
    }
    return true;
}

}  // namespace coopsched
