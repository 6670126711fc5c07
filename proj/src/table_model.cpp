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

#include "coopsched/table_model.hpp"

#include <algorithm>
#include <map>

namespace coopsched {

using nlohmann::json;

namespace {

/// All schedule sets over `streams` with at most `cap` entries and a unique
/// relay pair per destination, in lexicographic order; index 0 is empty.
std::vector<ScheduleSet> buildSetAlphabet(const std::vector<StreamId>& streams, int numUsers,
                                          int cap) {
    std::vector<StreamId> sorted = streams;
    std::sort(sorted.begin(), sorted.end());
    std::vector<ScheduleSet> sets;
    ScheduleSet current;
    std::vector<int> destRelay(numUsers, -1);

    auto descend = [&](auto&& self, int start) -> void {
        sets.push_back(current);
        if (static_cast<int>(current.size()) >= cap) return;
        for (int idx = start; idx < static_cast<int>(sorted.size()); ++idx) {
            const StreamId& s = sorted[idx];
            const int assigned = destRelay[s.dest];
            if (assigned >= 0 && assigned != s.relay) continue;
            const int saved = destRelay[s.dest];
            destRelay[s.dest] = s.relay;
            current.push_back(s);
            self(self, idx + 1);
            current.pop_back();
            destRelay[s.dest] = saved;
        }
    };
    descend(descend, 0);
    return sets;
}

}  // namespace

int TableInstance::setIndex(const ScheduleSet& set) const {
    for (int s = 0; s < numSets(); ++s)
        if (sets[s] == set) return s;
    throw std::invalid_argument("schedule set not in the instance alphabet");
}

double TableInstance::expectedUserRate(int user, int setIdx, int k) const {
    double r = 0.0;
    for (int z = 0; z < numFading(); ++z) r += fadingProbs[z] * userRates[user][setIdx][k][z];
    return r;
}

std::vector<int> TableInstance::relayPairIndices(const ScheduleSet& set) const {
    std::vector<int> out;
    for (const StreamId& s : set) {
        if (s.selfPair()) continue;
        const int v = pairs.index(s.dest, s.relay);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

std::vector<bool> TableInstance::destinationsOf(int setIdx) const {
    std::vector<bool> out(numUsers, false);
    for (const StreamId& s : sets[setIdx]) out[s.dest] = true;
    return out;
}

std::vector<bool> TableInstance::relaysOf(int setIdx) const {
    std::vector<bool> out(numUsers, false);
    for (const StreamId& s : sets[setIdx])
        if (!s.selfPair()) out[s.relay] = true;
    return out;
}

void TableInstance::validate() const {
    if (numUsers < 1) throw ConfigError("instance needs at least one user");
    if (sets.empty() || !sets[0].empty()) throw ConfigError("set alphabet must start empty");
    double sp = 0.0, sq = 0.0;
    for (double p : stateProbs) sp += p;
    for (double q : fadingProbs) sq += q;
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw ConfigError("state probabilities must sum to one");
    if (static_cast<int>(userRates.size()) != numUsers)
        throw ConfigError("rate table must cover every user");
    for (const auto& perUser : userRates) {
        if (static_cast<int>(perUser.size()) != numSets())
            throw ConfigError("rate table must cover every set");
        for (const auto& perSet : perUser) {
            if (static_cast<int>(perSet.size()) != numStates())
                throw ConfigError("rate table must cover every known state");
            for (const auto& perState : perSet)
                if (static_cast<int>(perState.size()) != numFading())
                    throw ConfigError("rate table must cover every fading state");
        }
    }
    if (static_cast<int>(availability.size()) != pairs.count())
        throw ConfigError("availability must cover every relay pair");
}

TableInstance TableInstance::fromJson(const json& j) {
    TableInstance t;
    t.numUsers = j.at("num_users").get<int>();
    t.pairs = PairIndexer(t.numUsers);
    t.kappa = j.at("kappa").get<double>();
    t.stateProbs = j.at("p_k").get<std::vector<double>>();
    t.fadingProbs = j.at("q_z").get<std::vector<double>>();

    for (const auto& row : j.at("streams")) {
        StreamId s{row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>()};
        t.streams.push_back(s);
    }
    std::sort(t.streams.begin(), t.streams.end());

    const int cap = j.value("max_streams", 2);
    t.sets = buildSetAlphabet(t.streams, t.numUsers, cap);

    if (j.contains("stream_rates")) {
        t.streamRates = j.at("stream_rates").get<std::vector<std::vector<std::vector<double>>>>();
        if (t.streamRates.size() != t.streams.size())
            throw ConfigError("stream_rates must cover every stream");
        t.buildUserRatesFromStreams();
    } else {
        t.userRates = j.at("user_rates")
                          .get<std::vector<std::vector<std::vector<std::vector<double>>>>>();
    }

    const auto& avail = j.at("availability");
    t.availability.assign(t.pairs.count(), Rational(1));
    if (avail.is_number()) {
        const Rational p = exactRational(avail.get<double>());
        std::fill(t.availability.begin(), t.availability.end(), p);
    } else {
        for (int v = 0; v < t.pairs.count(); ++v) {
            const auto [i, jj] = t.pairs.pair(v);
            t.availability[v] = exactRational(avail.at(i).at(jj).get<double>());
        }
    }

    if (j.contains("cliques")) {
        for (const auto& q : j.at("cliques")) {
            std::vector<int> clique = q.get<std::vector<int>>();
            std::sort(clique.begin(), clique.end());
            t.cliques.cliques.push_back(std::move(clique));
        }
    } else if (j.contains("pair_pathloss")) {
        RMatrix phi = RMatrix::Zero(t.numUsers, t.numUsers);
        const auto rows = j.at("pair_pathloss").get<std::vector<std::vector<double>>>();
        for (int i = 0; i < t.numUsers; ++i)
            for (int jj = 0; jj < t.numUsers; ++jj) phi(i, jj) = rows[i][jj];
        const double theta = j.value("connect_threshold", 1.0);
        const auto conflict = build_conflict(build_connectivity(phi, theta));
        t.cliques = maximal_cliques(chordalize(conflict.graph));
    } else {
        throw ConfigError("instance needs either cliques or pair_pathloss");
    }
    t.validate();
    return t;
}

json TableInstance::toJson() const {
    json j;
    j["num_users"] = numUsers;
    j["kappa"] = kappa;
    j["p_k"] = stateProbs;
    j["q_z"] = fadingProbs;
    json streamsJson = json::array();
    for (const StreamId& s : streams) streamsJson.push_back({s.dest, s.relay, s.stream});
    j["streams"] = streamsJson;
    j["user_rates"] = userRates;
    std::vector<std::vector<double>> avail(numUsers, std::vector<double>(numUsers, 1.0));
    for (int v = 0; v < pairs.count(); ++v) {
        const auto [i, jj] = pairs.pair(v);
        avail[i][jj] = toDouble(availability[v]);
    }
    j["availability"] = avail;
    j["cliques"] = cliques.cliques;
    int cap = 0;
    for (const auto& s : sets) cap = std::max(cap, static_cast<int>(s.size()));
    j["max_streams"] = cap;
    return j;
}

void TableInstance::buildUserRatesFromStreams() {
    userRates.assign(
        numUsers, std::vector<std::vector<std::vector<double>>>(
                      numSets(), std::vector<std::vector<double>>(
                                     numStates(), std::vector<double>(numFading(), 0.0))));
    for (int si = 0; si < numSets(); ++si)
        for (const StreamId& s : sets[si]) {
            const auto it = std::lower_bound(streams.begin(), streams.end(), s);
            const int streamIdx = static_cast<int>(it - streams.begin());
            for (int k = 0; k < numStates(); ++k)
                for (int z = 0; z < numFading(); ++z)
                    userRates[s.dest][si][k][z] += streamRates[streamIdx][k][z];
        }
}

TableInstance TableInstance::tinyTwoUser(double kappa) {
    TableInstance t;
    t.numUsers = 2;
    t.pairs = PairIndexer(2);
    t.kappa = kappa;
    t.stateProbs = {0.6, 0.4};
    t.fadingProbs = {0.5, 0.5};
    t.streams = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
    t.sets = buildSetAlphabet(t.streams, 2, 2);

    // streamRates[streamIdx][k][z], aligned with the sorted stream list.
    // User 0 is weak on the direct link and gains a lot from relaying by
    // user 1; user 1 never profits from being relayed.
    t.streamRates = {
        {{0.5, 0.5}, {0.4, 0.4}},  // (0,0): direct, fading-independent
        {{1.2, 2.0}, {1.0, 1.6}},  // (0,1): cooperative
        {{1.0, 1.2}, {0.9, 1.1}},  // (1,0): cooperative, dominated
        {{2.2, 2.2}, {2.6, 2.6}},  // (1,1): direct
    };
    t.buildUserRatesFromStreams();

    t.availability.assign(t.pairs.count(), Rational(3, 4));

    RMatrix phi = RMatrix::Zero(2, 2);
    phi(0, 1) = phi(1, 0) = 2.0;
    const auto conflict = build_conflict(build_connectivity(phi, 1.0));
    t.cliques = maximal_cliques(chordalize(conflict.graph));
    t.validate();
    return t;
}

TableInstance TableInstance::tinyThreeUser(double kappa) {
    TableInstance t;
    t.numUsers = 3;
    t.pairs = PairIndexer(3);
    t.kappa = kappa;
    t.stateProbs = {0.7, 0.3};
    t.fadingProbs = {0.5, 0.5};
    t.streams = {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}, {1, 2, 1}, {2, 2, 1}};
    t.sets = buildSetAlphabet(t.streams, 3, 2);

    t.streamRates = {
        {{0.6, 0.6}, {0.5, 0.5}},  // (0,0)
        {{1.7, 2.3}, {1.2, 1.8}},  // (0,1)
        {{1.1, 1.1}, {1.3, 1.3}},  // (1,1)
        {{1.6, 2.4}, {1.9, 2.5}},  // (1,2)
        {{2.8, 2.8}, {2.4, 2.4}},  // (2,2)
    };
    t.buildUserRatesFromStreams();

    t.availability.assign(t.pairs.count(), Rational(3, 4));

    RMatrix phi = RMatrix::Zero(3, 3);
    phi(0, 1) = phi(1, 0) = 2.0;
    phi(1, 2) = phi(2, 1) = 2.0;
    phi(0, 2) = phi(2, 0) = 0.5;
    const auto conflict = build_conflict(build_connectivity(phi, 1.0));
    t.cliques = maximal_cliques(chordalize(conflict.graph));
    t.validate();
    return t;
}

TableRateModel::TableRateModel(const TableInstance& instance, int knownState)
    : instance_(&instance), knownState_(knownState) {
    maxStreams_ = 0;
    for (const auto& s : instance.sets)
        maxStreams_ = std::max(maxStreams_, static_cast<int>(s.size()));
}

std::vector<double> TableRateModel::expectedStreamRates(const ScheduleSet& set) const {
    std::vector<double> rates(set.size(), 0.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto it =
            std::lower_bound(instance_->streams.begin(), instance_->streams.end(), set[i]);
        if (it == instance_->streams.end() || *it != set[i])
            throw std::invalid_argument("stream not in the instance");
        const int streamIdx = static_cast<int>(it - instance_->streams.begin());
        double r = 0.0;
        for (int z = 0; z < instance_->numFading(); ++z)
            r += instance_->fadingProbs[z] * instance_->streamRates[streamIdx][knownState_][z];
        rates[i] = r;
    }
    return rates;
}

CliqueStates make_clique_states(const TableInstance& instance) {
    return CliqueStates(instance.cliques, instance.pairs, instance.availability);
}

}  // namespace coopsched
