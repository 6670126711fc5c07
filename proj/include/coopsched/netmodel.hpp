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

#ifndef COOPSCHED_NETMODEL_HPP
#define COOPSCHED_NETMODEL_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "coopsched/rng.hpp"
#include "coopsched/types.hpp"

namespace coopsched {

/// Static network parameters. Loaded from JSON (see fromJson for field names).
struct NetworkConfig {
    int numUsers = 25;           ///< n
    int numAntennas = 8;         ///< M, base station antennas
    double cellRadius = 1000.0;  ///< cell disc radius [m]
    double clusterStd = 20.0;    ///< per-axis std of user offsets from cluster center [m]
    double clusterIntensity = 5.0 / (M_PI * 1e6);  ///< cluster centers per m^2
    double pathGain = 1.0;                         ///< rho, downlink path gain
    int numPaths = 2;                              ///< P, multipath components
    double antennaSpacing = 0.5;                   ///< Delta, in wavelengths
    double d2dRefGain = 1e8;                       ///< phi0, D2D gain at 1 m
    double d2dExponent = 3.5;                      ///< c > 2, D2D path-loss exponent
    double connectThreshold = 1.0;                 ///< theta, connectivity cutoff on phi
    RMatrix availability;                          ///< p_ij, n x n (diagonal unused)
    std::uint64_t rngSeed = 1;

    /// Minimum pairwise distance [m]; guards against diverging gain when a
    /// degenerate cluster puts two users at the same point.
    static constexpr double kMinPairDistance = 0.1;

    void setUniformAvailability(double p);
    void validate() const;

    static NetworkConfig fromJson(const nlohmann::json& j);
    nlohmann::json toJson() const;
};

/// One drop's geometry: cluster centers and user positions in the cell plane.
struct Geometry {
    std::vector<Eigen::Vector2d> clusterCenters;
    std::vector<Eigen::Vector2d> userPositions;
    std::vector<int> userCluster;
};

/// Per-frame channel snapshot.
struct ChannelState {
    std::vector<CVector> downlink;  ///< h_i, length-M complex vectors
    RMatrix pathloss;               ///< phi_ij, symmetric, diagonal unused
    CMatrix fading;                 ///< zeta_ij, symmetric (reciprocal links)
    IMatrix available;              ///< B_ij in {0,1}
    long frameIndex = 0;

    Complex d2dGain(int i, int j) const {
        return std::sqrt(pathloss(i, j)) * fading(i, j);
    }
};

/// Draw cluster centers (Poisson over the cell disc, resampled if zero) and
/// scatter users around uniformly chosen clusters.
Geometry place_users(const NetworkConfig& config, RandomStream& rng);

/// Uniform linear array response, entry k = exp(-j 2 pi k Delta cos(theta)).
CVector steering_vector(double theta, int numAntennas, double spacing);

/// Clustered multipath downlink channel h = sqrt(rho) sum_k xi_k e(theta_k).
CVector downlink_channel(const NetworkConfig& config, RandomStream& rng);

/// Decaying power-law D2D path loss phi0 * d^(-c). Distances below the
/// configured minimum are clamped.
double d2d_pathloss(double distance, const NetworkConfig& config);

/// Symmetric pairwise path-loss matrix from a geometry.
RMatrix pathloss_matrix(const Geometry& geometry, const NetworkConfig& config);

/// Draw reciprocal fading (zeta_ij = zeta_ji ~ CN(0,1)) and Bernoulli(p_ij)
/// availability for every ordered pair.
void draw_d2d_state(const RMatrix& pathloss, const RMatrix& availability, RandomStream& rng,
                    CMatrix& fadingOut, IMatrix& availableOut);

/// Full per-frame channel state for a fixed geometry.
ChannelState draw_channel_state(const NetworkConfig& config, const Geometry& geometry,
                                long frameIndex, RandomStream& rng);

}  // namespace coopsched

#endif
