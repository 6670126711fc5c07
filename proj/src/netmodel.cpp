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

#include "coopsched/netmodel.hpp"

#include <cmath>
#include <set>

namespace coopsched {

using nlohmann::json;

void NetworkConfig::setUniformAvailability(double p) {
    availability = RMatrix::Constant(numUsers, numUsers, p);
}

void NetworkConfig::validate() const {
    if (numUsers < 1) throw ConfigError("n must be >= 1");
    if (numAntennas < 1) throw ConfigError("M must be >= 1");
    if (numPaths < 1) throw ConfigError("num_paths must be >= 1");
    if (d2dExponent <= 2.0) throw ConfigError("pathloss_exp must be > 2");
    if (clusterStd >= cellRadius) throw ConfigError("cluster_std_m must be < cell_radius_m");
    if (cellRadius <= 0.0) throw ConfigError("cell_radius_m must be positive");
    if (clusterIntensity <= 0.0) throw ConfigError("cluster_intensity must be positive");
    if (pathGain < 0.0) throw ConfigError("rho must be nonnegative");
    if (d2dRefGain < 0.0) throw ConfigError("phi0 must be nonnegative");
    if (availability.rows() != numUsers || availability.cols() != numUsers)
        throw ConfigError("availability matrix must be n x n");
    for (int i = 0; i < numUsers; ++i)
        for (int j = 0; j < numUsers; ++j) {
            if (i == j) continue;
            const double p = availability(i, j);
            if (!(p > 0.0 && p <= 1.0)) throw ConfigError("availability must be in (0, 1]");
        }
}

NetworkConfig NetworkConfig::fromJson(const json& j) {
    static const std::set<std::string> known = {
        "n",       "M",         "cell_radius_m",     "cluster_std_m", "cluster_intensity",
        "rho",     "num_paths", "antenna_spacing",   "phi0",          "pathloss_exp",
        "connect_threshold",    "availability",      "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown network config key: " + it.key());

    NetworkConfig c;
    try {
        c.numUsers = j.at("n").get<int>();
        c.numAntennas = j.at("M").get<int>();
        c.cellRadius = j.at("cell_radius_m").get<double>();
        c.clusterStd = j.at("cluster_std_m").get<double>();
        c.clusterIntensity = j.at("cluster_intensity").get<double>();
        c.pathGain = j.at("rho").get<double>();
        c.numPaths = j.at("num_paths").get<int>();
        c.antennaSpacing = j.at("antenna_spacing").get<double>();
        c.d2dRefGain = j.at("phi0").get<double>();
        c.d2dExponent = j.at("pathloss_exp").get<double>();
        c.connectThreshold = j.at("connect_threshold").get<double>();
        c.rngSeed = j.at("seed").get<std::uint64_t>();
        const auto& avail = j.at("availability");
        if (avail.is_number()) {
            c.setUniformAvailability(avail.get<double>());
        } else {
            c.availability = RMatrix::Zero(c.numUsers, c.numUsers);
            const auto rows = avail.get<std::vector<std::vector<double>>>();
            if (static_cast<int>(rows.size()) != c.numUsers)
                throw ConfigError("availability matrix must be n x n");
            for (int i = 0; i < c.numUsers; ++i) {
                if (static_cast<int>(rows[i].size()) != c.numUsers)
                    throw ConfigError("availability matrix must be n x n");
                for (int jj = 0; jj < c.numUsers; ++jj) c.availability(i, jj) = rows[i][jj];
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad network config: ") + e.what());
    }
    c.validate();
    return c;
}

json NetworkConfig::toJson() const {
    json j;
    j["n"] = numUsers;
    j["M"] = numAntennas;
    j["cell_radius_m"] = cellRadius;
    j["cluster_std_m"] = clusterStd;
    j["cluster_intensity"] = clusterIntensity;
    j["rho"] = pathGain;
    j["num_paths"] = numPaths;
    j["antenna_spacing"] = antennaSpacing;
    j["phi0"] = d2dRefGain;
    j["pathloss_exp"] = d2dExponent;
    j["connect_threshold"] = connectThreshold;
    j["seed"] = rngSeed;
    bool uniform = true;
    const double p0 = numUsers > 1 ? availability(0, 1) : 1.0;
    for (int i = 0; i < numUsers && uniform; ++i)
        for (int jj = 0; jj < numUsers; ++jj)
            if (i != jj && availability(i, jj) != p0) {
                uniform = false;
                break;
            }
    if (uniform) {
        j["availability"] = p0;
    } else {
        std::vector<std::vector<double>> rows(numUsers, std::vector<double>(numUsers));
        for (int i = 0; i < numUsers; ++i)
            for (int jj = 0; jj < numUsers; ++jj) rows[i][jj] = availability(i, jj);
        j["availability"] = rows;
    }
    return j;
}

Geometry place_users(const NetworkConfig& config, RandomStream& rng) {
    Geometry g;
    const double area = M_PI * config.cellRadius * config.cellRadius;
    const double mean = config.clusterIntensity * area;

    // Degenerate zero-center draws are resampled, never returned.
    int numCenters = 0;
    while (numCenters == 0) numCenters = rng.poisson(mean);

    g.clusterCenters.reserve(numCenters);
    for (int c = 0; c < numCenters; ++c) {
        // uniform over the cell disc
        const double r = config.cellRadius * std::sqrt(rng.uniform());
        const double ang = rng.uniform(0.0, 2.0 * M_PI);
        g.clusterCenters.emplace_back(r * std::cos(ang), r * std::sin(ang));
    }

    g.userPositions.reserve(config.numUsers);
    g.userCluster.reserve(config.numUsers);
    for (int u = 0; u < config.numUsers; ++u) {
        const int c = static_cast<int>(rng.integer(numCenters));
        g.userCluster.push_back(c);
        const Eigen::Vector2d offset(config.clusterStd * rng.gaussian(),
                                     config.clusterStd * rng.gaussian());
        g.userPositions.push_back(g.clusterCenters[c] + offset);
    }
    return g;
}

CVector steering_vector(double theta, int numAntennas, double spacing) {
    CVector e(numAntennas);
    const double phase = 2.0 * M_PI * spacing * std::cos(theta);
    for (int k = 0; k < numAntennas; ++k) e(k) = std::polar(1.0, -phase * k);
    return e;
}

CVector downlink_channel(const NetworkConfig& config, RandomStream& rng) {
    CVector h = CVector::Zero(config.numAntennas);
    const double amp = std::sqrt(config.pathGain);
    for (int k = 0; k < config.numPaths; ++k) {
        const Complex gain = rng.complexGaussian();
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        h += amp * gain * steering_vector(theta, config.numAntennas, config.antennaSpacing);
    }
    return h;
}

double d2d_pathloss(double distance, const NetworkConfig& config) {
    const double d = std::max(distance, NetworkConfig::kMinPairDistance);
    return config.d2dRefGain * std::pow(d, -config.d2dExponent);
}

RMatrix pathloss_matrix(const Geometry& geometry, const NetworkConfig& config) {
    const int n = config.numUsers;
    RMatrix phi = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = (geometry.userPositions[i] - geometry.userPositions[j]).norm();
            phi(i, j) = phi(j, i) = d2d_pathloss(d, config);
        }
    return phi;
}

void draw_d2d_state(const RMatrix& pathloss, const RMatrix& availability, RandomStream& rng,
                    CMatrix& fadingOut, IMatrix& availableOut) {
    const int n = static_cast<int>(pathloss.rows());
    fadingOut = CMatrix::Zero(n, n);
    availableOut = IMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Complex z = rng.complexGaussian();
            fadingOut(i, j) = fadingOut(j, i) = z;  // reciprocity by construction
        }
    // B_ij is drawn per ordered pair; availability is directional.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            availableOut(i, j) = rng.bernoulli(availability(i, j)) ? 1 : 0;
        }
}

ChannelState draw_channel_state(const NetworkConfig& config, const Geometry& geometry,
                                long frameIndex, RandomStream& rng) {
    ChannelState s;
    s.frameIndex = frameIndex;
    s.pathloss = pathloss_matrix(geometry, config);
    s.downlink.reserve(config.numUsers);
    for (int u = 0; u < config.numUsers; ++u) s.downlink.push_back(downlink_channel(config, rng));
    draw_d2d_state(s.pathloss, config.availability, rng, s.fading, s.available);
    return s;
}

}  // namespace coopsched
