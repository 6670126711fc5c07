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

#include <doctest.h>

#include <cmath>

#include "coopsched/phy_model.hpp"
#include "coopsched/queueing.hpp"
#include "coopsched/sim.hpp"

using namespace coopsched;

namespace {

SimConfig smallSim(int users, long frames) {
    SimConfig c;
    c.net.numUsers = users;
    c.net.numAntennas = 4;
    c.net.cellRadius = 300.0;
    c.net.clusterStd = 15.0;
    c.net.clusterIntensity = 2.0 / (M_PI * 300.0 * 300.0);
    c.net.numPaths = 2;
    c.net.d2dRefGain = 1e8;
    c.net.d2dExponent = 3.5;
    c.net.connectThreshold = 1.0;
    c.net.setUniformAvailability(1.0);
    c.net.rngSeed = 5;
    c.frames = frames;
    c.ewmaWindow = 50;
    c.kappa = 2.0;
    c.greedyEps = 0.05;
    c.maxStreams = 4;
    c.drops = 1;
    c.scheduler = SchedulerKind::Greedy;
    return c;
}

}  // namespace

TEST_CASE("drops are bit-for-bit reproducible from the seed") {
    const SimConfig c = smallSim(6, 120);
    const DropResult a = run_drop(c, 99, 50);
    const DropResult b = run_drop(c, 99, 50);
    CHECK(a.throughput == b.throughput);
    CHECK(a.relayFraction == b.relayFraction);
    CHECK(a.streamCountHist == b.streamCountHist);

    const DropResult other = run_drop(c, 100, 50);
    CHECK(a.throughput != other.throughput);
}

TEST_CASE("baseline mode schedules no relays and keeps queues silent") {
    SimConfig c = smallSim(6, 150);
    c.cooperation = false;
    const DropResult r = run_drop(c, 3, 50);
    for (double f : r.relayFraction) CHECK(f == 0.0);
    CHECK(r.maxCliqueLoadAfterBurn == 0.0);
    CHECK(r.driftRecursionOk);
}

TEST_CASE("cooperative drops satisfy the exact drift recursion") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        SimConfig c = smallSim(6, 400);
        c.kappa = 0.0;  // heaviest relaying pressure
        const DropResult r = run_drop(c, seed, 100);
        CHECK(r.driftRecursionOk);
        // limsup proxy: every clique load stays under 1 + |Q|/(burn p_min)
        CHECK(r.maxCliqueLoadAfterBurn < 3.0);
    }
}

TEST_CASE("estimation error changes schedules, perfect CSI does not") {
    SimConfig perfect = smallSim(5, 80);
    SimConfig noisy = perfect;
    noisy.estimationErrorScale = 0.5;
    const DropResult a = run_drop(perfect, 11, 40);
    const DropResult b = run_drop(noisy, 11, 40);
    // same seed, different estimates: delivered averages must differ
    CHECK(a.throughput != b.throughput);
}

TEST_CASE("barrier scheduler runs the frame loop") {
    SimConfig c = smallSim(5, 100);
    c.scheduler = SchedulerKind::Barrier;
    c.barrierIndex = 200.0;
    const DropResult r = run_drop(c, 17, 50);
    double total = 0.0;
    for (double v : r.throughput) total += v;
    CHECK(total > 0.0);
}

TEST_CASE("quantile interpolation over a pooled sample") {
    const CdfSummary cdf = CdfSummary::of({4.0, 1.0, 3.0, 2.0});
    CHECK(cdf.quantile(0.0) == doctest::Approx(1.0));
    CHECK(cdf.quantile(1.0) == doctest::Approx(4.0));
    CHECK(cdf.quantile(0.5) == doctest::Approx(2.5));
    CHECK(cdf.quantile(1.0 / 3.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(CdfSummary::of({}).quantile(0.5), std::invalid_argument);
}

TEST_CASE("single-user drop gives a one-step CDF") {
    SimConfig c = smallSim(1, 100);
    const auto results = run_simulation(c, 50);
    const CdfSummary cdf = pool_throughput(results);
    REQUIRE(cdf.values.size() == 1);
    CHECK(cdf.quantile(0.05) == cdf.quantile(0.95));
}

TEST_CASE("exchangeable users have nearly flat throughput quantiles") {
    // all users in one degenerate cluster with no shadowing: identical
    // statistics, and the proportional-fair utility equalizes the rates
    SimConfig c = smallSim(6, 3000);
    c.net.clusterStd = 0.0;
    c.net.clusterIntensity = 1e-9;  // resampled to one cluster
    c.downlinkShadowingDb = 0.0;
    c.kappa = 1.0;
    c.drops = 2;
    const auto results = run_simulation(c, 500);
    const CdfSummary cdf = pool_throughput(results);
    CHECK(cdf.quantile(0.05) == doctest::Approx(cdf.quantile(0.5)).epsilon(0.05));
}

TEST_CASE("scaling helper: psi(2) is sqrt 2 and thresholds go vacuous for small n") {
    CHECK(scaling_psi(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(scaling_psi(4) == doctest::Approx(std::pow(24.0, 0.25)).epsilon(1e-9));

    ScalingConfig cfg;
    cfg.numAntennas = 8;
    const auto rows = scaling_experiment({10}, 4, cfg);
    REQUIRE(rows.size() == 1);
    // 0.5 ln 10 < 2 ln ln 10, so the cooperative threshold is negative
    CHECK(rows[0].coopThreshold < 0.0);
    CHECK(rows[0].coopAboveThresholdFraction == doctest::Approx(1.0));
}

TEST_CASE("scaling experiment rejects tiny clusters") {
    ScalingConfig cfg;
    CHECK_THROWS_AS(scaling_experiment({2}, 3, cfg), std::invalid_argument);
}

TEST_CASE("min-SNR medians move in opposite directions with cluster size") {
    ScalingConfig cfg;
    cfg.numAntennas = 8;
    cfg.numPaths = 2;
    cfg.seed = 3;
    const auto rows = scaling_experiment({10, 80}, 20, cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].coopMedian >= rows[0].coopMedian);
    CHECK(rows[1].noncoopMedian <= rows[0].noncoopMedian);
}

TEST_CASE("grid-averaged expected rates track a Monte-Carlo oracle") {
    // one destination + relay pair, strong side link
    RandomStream rng(71);
    const int m = 4;
    std::vector<CVector> h(2);
    for (auto& v : h) {
        v = CVector(m);
        for (int k = 0; k < m; ++k) v(k) = rng.complexGaussian();
    }
    RMatrix phi = RMatrix::Constant(2, 2, 20.0);
    const FadingGrid grid = FadingGrid::exponentialQuantiles(16);
    const std::vector<StreamId> candidates{{0, 0, 1}, {0, 1, 1}, {0, 1, 2}, {1, 1, 1}};
    const PhyRateModel model(h, phi, candidates, &grid, 3.0, 1.0, m);

    const ScheduleSet set{{0, 1, 1}, {1, 1, 1}};
    const auto gridRates = model.expectedStreamRates(set);

    // Monte-Carlo with true exponential fading through the same pipeline
    const int draws = 100000;
    std::vector<double> mc(set.size(), 0.0);
    for (int d = 0; d < draws; ++d) {
        const double z = -std::log(1.0 - rng.uniform());
        FadingGrid point;
        point.points = {z};
        point.probs = {1.0};
        const PhyRateModel sample(h, phi, candidates, &point, 3.0, 1.0, m);
        const auto r = sample.expectedStreamRates(set);
        for (std::size_t s = 0; s < r.size(); ++s) mc[s] += r[s] / draws;
    }
    for (std::size_t s = 0; s < set.size(); ++s)
        CHECK(gridRates[s] == doctest::Approx(mc[s]).epsilon(0.02));
}

TEST_CASE("certification converges on the built-in instance") {
    CertificationConfig cc;
    cc.frames = 20000;
    cc.seed = 11;
    cc.fwTol = 1e-6;
    const CertificationResult res = certify_scheduler(TableInstance::tinyTwoUser(), cc);
    CHECK(res.finalGap <= 0.05 * std::max(1.0, std::abs(res.optPrime)));
}

TEST_CASE("barrier and flow-control policies take identical trajectories") {
    const TraceCompareResult cmp =
        compare_barrier_flow_traces(TableInstance::tinyTwoUser(), 3000, 13, 200.0);
    CHECK(cmp.identical);
    CHECK_FALSE(cmp.boundaryHit);
}

TEST_CASE("sim config JSON: round-trip and unknown-key rejection") {
    SimConfig c = smallSim(5, 200);
    const auto j = c.toJson();
    const SimConfig back = SimConfig::fromJson(j);
    CHECK(back.frames == c.frames);
    CHECK(back.kappa == c.kappa);
    CHECK(back.scheduler == c.scheduler);

    auto bad = j;
    bad["not_a_key"] = true;
    CHECK_THROWS_AS(SimConfig::fromJson(bad), ConfigError);

    auto badFrames = j;
    badFrames["frames"] = 10;  // below the EWMA window
    CHECK_THROWS_AS(SimConfig::fromJson(badFrames), ConfigError);
}
