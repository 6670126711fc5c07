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

#ifndef COOPSCHED_TYPES_HPP
#define COOPSCHED_TYPES_HPP

#include <Eigen/Dense>
#include <compare>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace coopsched {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using IMatrix = Eigen::MatrixXi;

/// A downlink stream: data for user `dest`, assisted by user `relay`
/// (dest == relay means no relay), over SVD stream index `stream` (1 or 2).
struct StreamId {
    int dest = 0;
    int relay = 0;
    int stream = 1;

    bool selfPair() const { return dest == relay; }
    auto operator<=>(const StreamId&) const = default;
};

/// Schedule set for one frame, kept sorted for canonical comparisons.
using ScheduleSet = std::vector<StreamId>;

inline void canonicalize(ScheduleSet& s) { std::sort(s.begin(), s.end()); }

/// Ordered relay pair (dest, relay), dest != relay. These are the vertices
/// of the conflict graph; there are n*(n-1) of them for n users.
struct PairIndexer {
    int numUsers = 0;

    explicit PairIndexer(int n = 0) : numUsers(n) {}

    int count() const { return numUsers * (numUsers - 1); }

    int index(int dest, int relay) const {
        if (dest == relay) throw std::invalid_argument("self pair has no conflict vertex");
        return dest * (numUsers - 1) + (relay > dest ? relay - 1 : relay);
    }

    std::pair<int, int> pair(int idx) const {
        const int dest = idx / (numUsers - 1);
        int relay = idx % (numUsers - 1);
        if (relay >= dest) ++relay;
        return {dest, relay};
    }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace coopsched

#endif
