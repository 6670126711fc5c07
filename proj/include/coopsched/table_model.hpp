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

#ifndef COOPSCHED_TABLE_MODEL_HPP
#define COOPSCHED_TABLE_MODEL_HPP

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "coopsched/scheduler.hpp"
#include "coopsched/types.hpp"

namespace coopsched {

/// Finite-alphabet scheduling instance: explicit known-state and fading
/// alphabets with a fixed rate table. Drives both the reference solver and
/// the small-instance policy certification runs.
struct TableInstance {
    int numUsers = 0;
    std::vector<StreamId> streams;
    std::vector<ScheduleSet> sets;    ///< canonical; sets[0] is empty
    std::vector<double> stateProbs;   ///< p_k
    std::vector<double> fadingProbs;  ///< q_z

    /// userRates[i][s][k][z]: total rate delivered to user i under set s in
    /// state (k, z).
    std::vector<std::vector<std::vector<std::vector<double>>>> userRates;

    /// Optional per-stream decomposition (additive instances); needed by the
    /// policy simulations, not by the solver.
    std::vector<std::vector<std::vector<double>>> streamRates;  ///< [streamIdx][k][z]

    PairIndexer pairs;
    std::vector<Rational> availability;  ///< p_ij per conflict vertex
    CliqueList cliques;                  ///< over conflict vertex indices
    double kappa = 1.0;

    int numSets() const { return static_cast<int>(sets.size()); }
    int numStates() const { return static_cast<int>(stateProbs.size()); }
    int numFading() const { return static_cast<int>(fadingProbs.size()); }

    int setIndex(const ScheduleSet& set) const;

    /// E over z of userRates[i][s][k][.].
    double expectedUserRate(int user, int setIdx, int k) const;

    /// Relay pairs (conflict vertex indices) appearing in a set.
    std::vector<int> relayPairIndices(const ScheduleSet& set) const;

    /// Destinations / relays of a set (s1 and s2 in the occupancy algebra).
    std::vector<bool> destinationsOf(int setIdx) const;
    std::vector<bool> relaysOf(int setIdx) const;

    void validate() const;

    /// Fill userRates additively from streamRates.
    void buildUserRatesFromStreams();

    static TableInstance fromJson(const nlohmann::json& j);
    nlohmann::json toJson() const;

    /// Built-in two-user certification instance: one weak user with a strong
    /// relay option, slack stability region, |K| = |Z| = 2.
    static TableInstance tinyTwoUser(double kappa = 1.0);

    /// Built-in three-user instance for policy cross-checks.
    static TableInstance tinyThreeUser(double kappa = 1.0);
};

/// RateModel view of a TableInstance pinned to one known state k.
class TableRateModel : public RateModel {
  public:
    TableRateModel(const TableInstance& instance, int knownState);

    const std::vector<StreamId>& streams() const override { return instance_->streams; }
    std::vector<double> expectedStreamRates(const ScheduleSet& set) const override;
    int maxStreams() const override { return maxStreams_; }

    void setKnownState(int k) { knownState_ = k; }

  private:
    const TableInstance* instance_;
    int knownState_;
    int maxStreams_;
};

/// Clique states initialised from a table instance.
CliqueStates make_clique_states(const TableInstance& instance);

}  // namespace coopsched

#endif
