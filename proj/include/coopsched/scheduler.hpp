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

#ifndef COOPSCHED_SCHEDULER_HPP
#define COOPSCHED_SCHEDULER_HPP

#include <memory>
#include <vector>

#include "coopsched/conflict.hpp"
#include "coopsched/fading.hpp"
#include "coopsched/rational.hpp"
#include "coopsched/types.hpp"

namespace coopsched {

struct UtilityParams {
    double kappa = 0.0;  ///< trade-off between throughput and relaying load
};

/// U_i = ln(r) + kappa ln(1 - beta). Natural log; the base cancels in every
/// argmax the scheduler takes.
double utility(double throughput, double relayFraction, const UtilityParams& params);

/// (dU/dr, dU/dbeta) = (1/r, -kappa/(1-beta)).
std::pair<double, double> utility_gradient(double throughput, double relayFraction,
                                           const UtilityParams& params);

enum class AveragingMode { Running, Ewma };

/// Per-user running state driving the scheduler's gradients.
struct UserState {
    double rateAvg = 0.0;    ///< r_i(t)
    double relayAvg = 0.0;   ///< beta_i(t)

    /// Gradient floor keeping 1/r finite before the first delivery.
    static constexpr double kWarmStartRate = 1e-3;

    double throughputForGradient() const {
        return rateAvg > kWarmStartRate ? rateAvg : kWarmStartRate;
    }
};

std::vector<UserState> make_user_states(int numUsers);

/// Fold one frame of delivered rates and relay indicators into the averages.
/// Running mode keeps exact means over t frames; EWMA mode uses window Tw.
void update_user_states(std::vector<UserState>& states,
                        const std::vector<double>& deliveredRate,
                        const std::vector<bool>& relayedThisFrame, long frame,
                        AveragingMode mode, int ewmaWindow = 50);

/// Exact clique-load bookkeeping beta_Q(t) = sum_{(i,j) in Q} beta_ij(t)/p_ij
/// over the maximal cliques of the chordal completion. Loads are rationals so
/// membership at the region boundary is unambiguous.
class CliqueStates {
  public:
    CliqueStates() = default;
    CliqueStates(CliqueList cliques, PairIndexer pairs, std::vector<Rational> availability);

    /// Record the relay arrivals of a committed schedule (advances t).
    void commit(const ScheduleSet& schedule);

    long frames() const { return frames_; }
    int cliqueCount() const { return static_cast<int>(cliques_.cliques.size()); }
    int pairCount() const { return pairs_.count(); }
    const CliqueList& cliques() const { return cliques_; }

    Rational load(int cliqueIdx) const;
    double loadAsDouble(int cliqueIdx) const { return toDouble(load(cliqueIdx)); }
    const Rational& weightedCount(int cliqueIdx) const { return weighted_[cliqueIdx]; }
    bool cliqueWithinBound(int cliqueIdx) const;  ///< beta_Q <= 1, exact
    bool pairEligible(int pairIdx) const;
    const std::vector<int>& cliquesOfPair(int pairIdx) const { return pairToCliques_[pairIdx]; }
    bool anyBoundaryExact() const;  ///< some beta_Q == 1 exactly

  private:
    CliqueList cliques_;
    PairIndexer pairs_;
    std::vector<Rational> invAvailability_;
    std::vector<std::vector<int>> pairToCliques_;
    std::vector<Rational> weighted_;  ///< t * beta_Q
    long frames_ = 0;
};

/// Flow-control set Nbar(t): relay pairs whose every containing clique load
/// is at most 1 (closed constraint). Indexed by conflict-vertex pair index.
std::vector<bool> eligible_pairs(const CliqueStates& states);

/// Joint expected-rate provider for candidate schedule sets. The PHY-backed
/// implementation averages MU-MIMO rates over the fading grid; the
/// table-backed one reads a fixed rate table.
class RateModel {
  public:
    virtual ~RateModel() = default;

    /// Streams available this frame (self pairs plus usable relay pairs).
    virtual const std::vector<StreamId>& streams() const = 0;

    /// Expected per-stream rates E_Z[R | K], aligned with `set`. Rates are
    /// joint: they account for inter-stream interference within the set.
    virtual std::vector<double> expectedStreamRates(const ScheduleSet& set) const = 0;

    /// Spatial cap on concurrently scheduled streams.
    virtual int maxStreams() const = 0;
};

/// f(s) = sum over streams of E_Z[R|K]/r_i - kappa/(1 - beta_j) [relay pairs
/// only], evaluated at the previous frame's averages.
double objective_f(const RateModel& model, const ScheduleSet& set,
                   const std::vector<UserState>& states, const UtilityParams& params);

/// Barrier-augmented objective: f(s) minus nB exp(nB (beta_Q - 1)) for every
/// clique touched by the set's relay pairs. No flow-control filtering; the
/// barrier replaces it. Exponents are clamped at 700 and saturate to an
/// infinite penalty.
double barrier_objective(const RateModel& model, const ScheduleSet& set,
                         const std::vector<UserState>& states, const UtilityParams& params,
                         double barrierIndex, const CliqueStates& cliqueStates);

/// Exhaustive policy: argmax of f over subsets of eligible streams, capped at
/// min(maxStreams, model cap), one relay pair per destination, lexicographic
/// tie-break. Commits the chosen set's arrivals to the clique states.
/// Rejects instances with more than 20 candidate streams.
ScheduleSet exhaustive_schedule(const RateModel& model, const std::vector<UserState>& states,
                                const UtilityParams& params, CliqueStates& cliqueStates,
                                int maxStreams);

/// Greedy policy: iteratively add the best stream until the objective stops
/// improving by a factor (1 + eps) or the stream cap is reached. Commits the
/// built set's arrivals to the clique states.
ScheduleSet greedy_schedule(const RateModel& model, const std::vector<UserState>& states,
                            const UtilityParams& params, CliqueStates& cliqueStates, double eps,
                            int maxStreams);

/// Exhaustive argmax of the barrier objective over all streams (no
/// eligibility filtering). Commits arrivals.
ScheduleSet exhaustive_barrier_schedule(const RateModel& model,
                                        const std::vector<UserState>& states,
                                        const UtilityParams& params, CliqueStates& cliqueStates,
                                        double barrierIndex, int maxStreams);

/// Greedy build-up of the barrier objective over all streams, for instances
/// too large to enumerate. Commits arrivals.
ScheduleSet greedy_barrier_schedule(const RateModel& model, const std::vector<UserState>& states,
                                    const UtilityParams& params, CliqueStates& cliqueStates,
                                    double barrierIndex, double eps, int maxStreams);

}  // namespace coopsched

#endif
