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

#include "coopsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace coopsched {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double utility(double throughput, double relayFraction, const UtilityParams& params) {
    if (throughput <= 0.0) throw std::invalid_argument("utility requires positive throughput");
    if (relayFraction < 0.0 || relayFraction >= 1.0)
        throw std::invalid_argument("utility requires relay fraction in [0, 1)");
    return std::log(throughput) + params.kappa * std::log1p(-relayFraction);
}

std::pair<double, double> utility_gradient(double throughput, double relayFraction,
                                           const UtilityParams& params) {
    if (throughput <= 0.0) throw std::invalid_argument("gradient requires positive throughput");
    if (relayFraction < 0.0 || relayFraction >= 1.0)
        throw std::invalid_argument("gradient requires relay fraction in [0, 1)");
    return {1.0 / throughput, -params.kappa / (1.0 - relayFraction)};
}

std::vector<UserState> make_user_states(int numUsers) {
    std::vector<UserState> states(numUsers);
    for (auto& s : states) s.rateAvg = UserState::kWarmStartRate;
    return states;
}

void update_user_states(std::vector<UserState>& states, const std::vector<double>& deliveredRate,
                        const std::vector<bool>& relayedThisFrame, long frame,
                        AveragingMode mode, int ewmaWindow) {
    if (frame < 1) throw std::invalid_argument("frames are indexed from 1");
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double relayed = relayedThisFrame[i] ? 1.0 : 0.0;
        if (mode == AveragingMode::Running) {
            states[i].rateAvg = ((frame - 1) * states[i].rateAvg + deliveredRate[i]) / frame;
            states[i].relayAvg = ((frame - 1) * states[i].relayAvg + relayed) / frame;
        } else {
            const double w = 1.0 / ewmaWindow;
            states[i].rateAvg = (1.0 - w) * states[i].rateAvg + w * deliveredRate[i];
            states[i].relayAvg = (1.0 - w) * states[i].relayAvg + w * relayed;
        }
    }
}

CliqueStates::CliqueStates(CliqueList cliques, PairIndexer pairs,
                           std::vector<Rational> availability)
    : cliques_(std::move(cliques)), pairs_(pairs) {
    const int pairCount = pairs_.count();
    if (static_cast<int>(availability.size()) != pairCount)
        throw std::invalid_argument("availability must cover every relay pair");
    invAvailability_.reserve(pairCount);
    for (const auto& p : availability) {
        if (p <= 0) throw std::invalid_argument("availability must be positive");
        invAvailability_.push_back(Rational(1) / p);
    }
    pairToCliques_.assign(pairCount, {});
    for (int q = 0; q < static_cast<int>(cliques_.cliques.size()); ++q)
        for (int v : cliques_.cliques[q]) pairToCliques_[v].push_back(q);
    weighted_.assign(cliques_.cliques.size(), Rational(0));
}

void CliqueStates::commit(const ScheduleSet& schedule) {
    std::set<int> relayPairs;
    for (const StreamId& s : schedule)
        if (!s.selfPair()) relayPairs.insert(pairs_.index(s.dest, s.relay));
    for (int v : relayPairs)
        for (int q : pairToCliques_[v]) weighted_[q] += invAvailability_[v];
    ++frames_;
}

Rational CliqueStates::load(int cliqueIdx) const {
    if (frames_ == 0) return Rational(0);
    return weighted_[cliqueIdx] / frames_;
}

bool CliqueStates::cliqueWithinBound(int cliqueIdx) const {
    return weighted_[cliqueIdx] <= Rational(frames_);
}

bool CliqueStates::pairEligible(int pairIdx) const {
    for (int q : pairToCliques_[pairIdx])
        if (!cliqueWithinBound(q)) return false;
    return true;
}

bool CliqueStates::anyBoundaryExact() const {
    if (frames_ == 0) return false;
    for (const auto& w : weighted_)
        if (w == Rational(frames_)) return true;
    return false;
}

std::vector<bool> eligible_pairs(const CliqueStates& states) {
    std::vector<bool> ok(states.pairCount());
    for (int v = 0; v < states.pairCount(); ++v) ok[v] = states.pairEligible(v);
    return ok;
}

double objective_f(const RateModel& model, const ScheduleSet& set,
                   const std::vector<UserState>& states, const UtilityParams& params) {
    if (set.empty()) return 0.0;
    const std::vector<double> rates = model.expectedStreamRates(set);
    double f = 0.0;
    for (std::size_t k = 0; k < set.size(); ++k) {
        const StreamId& s = set[k];
        f += rates[k] / states[s.dest].throughputForGradient();
        if (!s.selfPair() && params.kappa > 0.0) {
            const double idle = 1.0 - states[s.relay].relayAvg;
            f -= idle > 0.0 ? params.kappa / idle : kInf;
        }
    }
    return f;
}

double barrier_objective(const RateModel& model, const ScheduleSet& set,
                         const std::vector<UserState>& states, const UtilityParams& params,
                         double barrierIndex, const CliqueStates& cliqueStates) {
    double f = objective_f(model, set, states, params);
    const PairIndexer pairs(static_cast<int>(states.size()));
    std::set<int> touched;
    for (const StreamId& s : set)
        if (!s.selfPair())
            for (int q : cliqueStates.cliquesOfPair(pairs.index(s.dest, s.relay)))
                touched.insert(q);
    for (int q : touched) {
        const double exponent = barrierIndex * (cliqueStates.loadAsDouble(q) - 1.0);
        f -= exponent > 700.0 ? kInf : barrierIndex * std::exp(exponent);
    }
    return f;
}

namespace {

struct SubsetSearch {
    const RateModel* model;
    const std::vector<UserState>* states;
    const UtilityParams* params;
    const CliqueStates* cliqueStates;
    double barrierIndex = 0.0;  // > 0 enables the barrier objective
    int cap = 1;

    std::vector<StreamId> candidates;
    ScheduleSet current;
    std::vector<int> destRelay;  // relay chosen per destination, -1 if free

    ScheduleSet best;
    double bestValue = 0.0;

    double evaluate(const ScheduleSet& set) const {
        return barrierIndex > 0.0
                   ? barrier_objective(*model, set, *states, *params, barrierIndex, *cliqueStates)
                   : objective_f(*model, set, *states, *params);
    }

    bool compatible(const StreamId& s) const {
        const int assigned = destRelay[s.dest];
        return assigned < 0 || assigned == s.relay;
    }

    void run() {
        destRelay.assign(states->size(), -1);
        best.clear();
        bestValue = evaluate(best);  // empty set scores zero
        descend(0);
    }

    void descend(int start) {
        if (static_cast<int>(current.size()) >= cap) return;
        for (int idx = start; idx < static_cast<int>(candidates.size()); ++idx) {
            const StreamId& s = candidates[idx];
            if (!compatible(s)) continue;
            const int saved = destRelay[s.dest];
            destRelay[s.dest] = s.relay;
            current.push_back(s);
            const double value = evaluate(current);
            if (value > bestValue) {
                bestValue = value;
                best = current;
            }
            descend(idx + 1);
            current.pop_back();
            destRelay[s.dest] = saved;
        }
    }
};

std::vector<StreamId> eligibleCandidates(const RateModel& model, const CliqueStates& cliqueStates,
                                         int numUsers, bool filterEligibility) {
    const PairIndexer pairs(numUsers);
    std::vector<StreamId> out;
    for (const StreamId& s : model.streams()) {
        if (filterEligibility && !s.selfPair() &&
            !cliqueStates.pairEligible(pairs.index(s.dest, s.relay)))
            continue;
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

ScheduleSet exhaustive_schedule(const RateModel& model, const std::vector<UserState>& states,
                                const UtilityParams& params, CliqueStates& cliqueStates,
                                int maxStreams) {
    SubsetSearch search;
    search.model = &model;
    search.states = &states;
    search.params = &params;
    search.cliqueStates = &cliqueStates;
    search.cap = std::min(maxStreams, model.maxStreams());
    search.candidates =
        eligibleCandidates(model, cliqueStates, static_cast<int>(states.size()), true);
    if (search.candidates.size() > 20)
        throw std::invalid_argument(
            "exhaustive schedule guard exceeded (> 20 candidate streams); use greedy_schedule");
    search.run();
    cliqueStates.commit(search.best);
    return search.best;
}

ScheduleSet exhaustive_barrier_schedule(const RateModel& model,
                                        const std::vector<UserState>& states,
                                        const UtilityParams& params, CliqueStates& cliqueStates,
                                        double barrierIndex, int maxStreams) {
    SubsetSearch search;
    search.model = &model;
    search.states = &states;
    search.params = &params;
    search.cliqueStates = &cliqueStates;
    search.barrierIndex = barrierIndex;
    search.cap = std::min(maxStreams, model.maxStreams());
    search.candidates =
        eligibleCandidates(model, cliqueStates, static_cast<int>(states.size()), false);
    if (search.candidates.size() > 20)
        throw std::invalid_argument(
            "exhaustive schedule guard exceeded (> 20 candidate streams); use greedy_schedule");
    search.run();
    cliqueStates.commit(search.best);
    return search.best;
}

namespace {

ScheduleSet greedyBuild(const RateModel& model, const std::vector<UserState>& states,
                        const UtilityParams& params, CliqueStates& cliqueStates,
                        double barrierIndex, double eps, int maxStreams) {
    if (!(eps > 0.0)) throw std::invalid_argument("greedy improvement factor must be positive");
    const int cap = std::min(maxStreams, model.maxStreams());
    const bool barrier = barrierIndex > 0.0;
    const std::vector<StreamId> candidates =
        eligibleCandidates(model, cliqueStates, static_cast<int>(states.size()), !barrier);

    const auto score = [&](const ScheduleSet& set) {
        return barrier ? barrier_objective(model, set, states, params, barrierIndex, cliqueStates)
                       : objective_f(model, set, states, params);
    };

    ScheduleSet committed;
    std::vector<int> destRelay(states.size(), -1);
    double fPrev = 0.0;

    for (int iter = 0; iter < cap; ++iter) {
        double bestF = -kInf;
        int bestIdx = -1;
        ScheduleSet trial;
        for (int idx = 0; idx < static_cast<int>(candidates.size()); ++idx) {
            const StreamId& s = candidates[idx];
            const int assigned = destRelay[s.dest];
            if (assigned >= 0 && assigned != s.relay) continue;
            if (std::find(committed.begin(), committed.end(), s) != committed.end()) continue;
            trial = committed;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), s), s);
            const double f = score(trial);
            if (f > bestF) {
                bestF = f;
                bestIdx = idx;
            }
        }
        if (bestIdx < 0) break;
        const double threshold = fPrev <= 0.0 ? 0.0 : (1.0 + eps) * fPrev;
        if (!(bestF > threshold)) break;
        const StreamId& s = candidates[bestIdx];
        committed.insert(std::upper_bound(committed.begin(), committed.end(), s), s);
        destRelay[s.dest] = s.relay;
        fPrev = bestF;
    }
    cliqueStates.commit(committed);
    return committed;
}

}  // namespace

ScheduleSet greedy_schedule(const RateModel& model, const std::vector<UserState>& states,
                            const UtilityParams& params, CliqueStates& cliqueStates, double eps,
                            int maxStreams) {
    return greedyBuild(model, states, params, cliqueStates, 0.0, eps, maxStreams);
}

ScheduleSet greedy_barrier_schedule(const RateModel& model, const std::vector<UserState>& states,
                                    const UtilityParams& params, CliqueStates& cliqueStates,
                                    double barrierIndex, double eps, int maxStreams) {
    if (barrierIndex <= 0.0) throw std::invalid_argument("barrier index must be positive");
    return greedyBuild(model, states, params, cliqueStates, barrierIndex, eps, maxStreams);
}

}  // namespace coopsched
