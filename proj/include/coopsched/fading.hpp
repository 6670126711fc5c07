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

#ifndef COOPSCHED_FADING_HPP
#define COOPSCHED_FADING_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace coopsched {

/// Finite alphabet for the D2D fading power |zeta|^2, used to take
/// expectations over the network state unknown at the base station.
struct FadingGrid {
    std::vector<double> points;  ///< |zeta|^2 values
    std::vector<double> probs;   ///< matching probabilities, sum to 1

    /// Quantile-midpoint discretization of the Exp(1) law of |zeta|^2.
    static FadingGrid exponentialQuantiles(int n = 16) {
        if (n < 1) throw std::invalid_argument("grid size must be positive");
        FadingGrid g;
        g.points.resize(n);
        g.probs.assign(n, 1.0 / n);
        for (int i = 0; i < n; ++i) {
            const double u = (i + 0.5) / n;
            g.points[i] = -std::log1p(-u);
        }
        return g;
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) m += probs[i] * points[i];
        return m;
    }
};

}  // namespace coopsched

#endif
