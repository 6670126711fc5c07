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

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "coopsched/netmodel.hpp"

using namespace coopsched;
using nlohmann::json;

namespace {

NetworkConfig baseConfig() {
    NetworkConfig c;
    c.numUsers = 4;
    c.numAntennas = 4;
    c.setUniformAvailability(1.0);
    return c;
}

}  // namespace

TEST_CASE("steering vector is all ones at broadside") {
    const CVector e = steering_vector(M_PI / 2.0, 6, 0.5);
    for (int k = 0; k < 6; ++k) {
        CHECK(e(k).real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e(k).imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("steering vector has squared norm M for any angle") {
    RandomStream rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(rng.integer(16));
        const CVector e = steering_vector(rng.uniform(0.0, 2.0 * M_PI), m, rng.uniform(0.1, 2.0));
        CHECK(e.squaredNorm() == doctest::Approx(m).epsilon(1e-12));
    }
}

TEST_CASE("steering vector alternates sign at endfire with half-wavelength spacing") {
    const CVector e = steering_vector(0.0, 4, 0.5);
    for (int k = 0; k < 4; ++k) {
        const double expected = k % 2 == 0 ? 1.0 : -1.0;
        CHECK(e(k).real() == doctest::Approx(expected).epsilon(1e-9));
        CHECK(std::abs(e(k).imag()) < 1e-9);
    }
}

TEST_CASE("single-path channel has constant per-antenna magnitude") {
    NetworkConfig c = baseConfig();
    c.numPaths = 1;
    c.pathGain = 2.5;
    RandomStream rng(3);
    const CVector h = downlink_channel(c, rng);
    const double mag = std::abs(h(0));
    for (int k = 1; k < c.numAntennas; ++k) CHECK(std::abs(h(k)) == doctest::Approx(mag));
}

TEST_CASE("zero path gain yields the zero channel") {
    NetworkConfig c = baseConfig();
    c.pathGain = 0.0;
    RandomStream rng(3);
    CHECK(downlink_channel(c, rng).norm() == 0.0);
}

TEST_CASE("mean channel energy matches M rho P") {
    NetworkConfig c = baseConfig();
    c.numAntennas = 4;
    c.numPaths = 3;
    c.pathGain = 1.7;
    RandomStream rng(17);
    double sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) sum += downlink_channel(c, rng).squaredNorm();
    const double expected = c.numAntennas * c.pathGain * c.numPaths;
    CHECK(sum / draws == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("d2d path loss follows the decaying power law") {
    NetworkConfig c = baseConfig();
    c.d2dRefGain = 3.0;
    c.d2dExponent = 3.5;
    CHECK(d2d_pathloss(1.0, c) == doctest::Approx(3.0));
    const double base = d2d_pathloss(7.0, c);
    CHECK(d2d_pathloss(14.0, c) == doctest::Approx(base * std::pow(2.0, -3.5)));
    // coincident users are clamped, not infinite
    CHECK(d2d_pathloss(0.0, c) == doctest::Approx(d2d_pathloss(0.1, c)));
}

TEST_CASE("path-loss tail matches the uniform-disc law (KS test)") {
    // With one endpoint at the center and the other uniform on the disc,
    // (d/R)^2 is uniform on [0,1]; equivalently P{phi >= x} ~ x^(-2/c).
    NetworkConfig c = baseConfig();
    c.d2dExponent = 3.0;
    const double radius = 50.0;
    RandomStream rng(23);
    const int samples = 100000;
    std::vector<double> u(samples);
    for (int i = 0; i < samples; ++i) {
        const double r = radius * std::sqrt(rng.uniform());
        const double phi = d2d_pathloss(r, c);
        const double dBack = std::pow(phi / c.d2dRefGain, -1.0 / c.d2dExponent);
        u[i] = (dBack / radius) * (dBack / radius);
    }
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (int i = 0; i < samples; ++i) {
        ks = std::max(ks, std::abs(u[i] - static_cast<double>(i) / samples));
        ks = std::max(ks, std::abs(u[i] - static_cast<double>(i + 1) / samples));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("degenerate cluster geometry puts all users at one point") {
    NetworkConfig c = baseConfig();
    c.numUsers = 6;
    c.clusterStd = 0.0;
    c.cellRadius = 100.0;
    c.clusterIntensity = 1e-9;  // zero draws dominate; resampling must still yield >= 1
    RandomStream rng(5);
    const Geometry g = place_users(c, rng);
    REQUIRE(g.clusterCenters.size() >= 1);
    if (g.clusterCenters.size() == 1) {
        for (const auto& p : g.userPositions) {
            CHECK(p.x() == doctest::Approx(g.clusterCenters[0].x()));
            CHECK(p.y() == doctest::Approx(g.clusterCenters[0].y()));
        }
    }
    for (int u = 0; u < c.numUsers; ++u) {
        CHECK(g.userCluster[u] >= 0);
        CHECK(g.userCluster[u] < static_cast<int>(g.clusterCenters.size()));
    }
}

TEST_CASE("large-cell default draws five clusters on average") {
    NetworkConfig c;  // defaults mirror the large-cell setup
    c.setUniformAvailability(1.0);
    RandomStream rng(29);
    double total = 0.0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) total += place_users(c, rng).clusterCenters.size();
    CHECK(total / seeds == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("mean cluster count tracks intensity times disc area") {
    NetworkConfig c = baseConfig();
    c.cellRadius = 200.0;
    c.clusterStd = 10.0;
    c.clusterIntensity = 8.0 / (M_PI * c.cellRadius * c.cellRadius);
    const double expected = c.clusterIntensity * M_PI * c.cellRadius * c.cellRadius;
    RandomStream rng(31);
    double total = 0.0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) total += place_users(c, rng).clusterCenters.size();
    CHECK(total / seeds == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("d2d state: full availability and reciprocity") {
    NetworkConfig c = baseConfig();
    RandomStream rng(41);
    const Geometry g = place_users(c, rng);
    const RMatrix phi = pathloss_matrix(g, c);
    CMatrix zeta;
    IMatrix b;
    draw_d2d_state(phi, c.availability, rng, zeta, b);
    for (int i = 0; i < c.numUsers; ++i)
        for (int j = 0; j < c.numUsers; ++j) {
            if (i == j) continue;
            CHECK(b(i, j) == 1);
            CHECK(zeta(i, j) == zeta(j, i));
            CHECK(phi(i, j) == phi(j, i));
        }
}

TEST_CASE("d2d availability frequency matches the Bernoulli parameter") {
    NetworkConfig c = baseConfig();
    c.numUsers = 2;
    c.setUniformAvailability(0.3);
    RMatrix phi = RMatrix::Zero(2, 2);
    phi(0, 1) = phi(1, 0) = 1.0;
    RandomStream rng(43);
    long hits = 0;
    const int frames = 100000;
    CMatrix zeta;
    IMatrix b;
    for (int t = 0; t < frames; ++t) {
        draw_d2d_state(phi, c.availability, rng, zeta, b);
        hits += b(0, 1);
    }
    CHECK(static_cast<double>(hits) / frames == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("identical seeds reproduce geometry and channel state bit for bit") {
    NetworkConfig c = baseConfig();
    c.setUniformAvailability(0.5);
    for (int run = 0; run < 2; ++run) {
        RandomStream a(12345), b(12345);
        const Geometry ga = place_users(c, a), gb = place_users(c, b);
        REQUIRE(ga.userPositions.size() == gb.userPositions.size());
        for (std::size_t i = 0; i < ga.userPositions.size(); ++i)
            CHECK(ga.userPositions[i] == gb.userPositions[i]);
        const ChannelState sa = draw_channel_state(c, ga, 1, a);
        const ChannelState sb = draw_channel_state(c, gb, 1, b);
        for (int u = 0; u < c.numUsers; ++u) CHECK(sa.downlink[u] == sb.downlink[u]);
        CHECK(sa.fading == sb.fading);
        CHECK(sa.available == sb.available);
    }
}

TEST_CASE("network config JSON round-trips and rejects bad input") {
    NetworkConfig c = baseConfig();
    c.setUniformAvailability(0.7);
    const json j = c.toJson();
    const NetworkConfig back = NetworkConfig::fromJson(j);
    CHECK(back.numUsers == c.numUsers);
    CHECK(back.d2dExponent == c.d2dExponent);
    CHECK(back.availability(0, 1) == doctest::Approx(0.7));

    json bad = j;
    bad["unexpected_key"] = 1;
    CHECK_THROWS_AS(NetworkConfig::fromJson(bad), ConfigError);

    json badExp = j;
    badExp["pathloss_exp"] = 1.5;  // must exceed 2
    CHECK_THROWS_AS(NetworkConfig::fromJson(badExp), ConfigError);

    json badAvail = j;
    badAvail["availability"] = 0.0;
    CHECK_THROWS_AS(NetworkConfig::fromJson(badAvail), ConfigError);
}
