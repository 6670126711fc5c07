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

#include "coopsched/phy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coopsched {

PhyRateModel::PhyRateModel(const std::vector<CVector>& estimate, const RMatrix& pathloss,
                           std::vector<StreamId> candidates, const FadingGrid* grid,
                           double snrBackoffDb, double noiseFloor, int spatialCap)
    : candidates_(std::move(candidates)),
      grid_(grid),
      backoff_(std::pow(10.0, snrBackoffDb / 10.0)),
      noiseFloor_(noiseFloor),
      cap_(spatialCap) {
    std::sort(candidates_.begin(), candidates_.end());
    const auto built = virtual_channels_fixed_fading(candidates_, estimate, pathloss, 1.0);
    data_.reserve(built.size());
    for (std::size_t i = 0; i < built.size(); ++i) {
        StreamData d;
        d.eff = built[i].effVector;
        d.u2sq = std::norm(built[i].leftColumn(1));
        d.self = candidates_[i].selfPair();
        if (!d.self) {
            // built at fading power 1, so distortion.value == condVar / phi
            d.condOverPhi = built[i].distortion.unavailable
                                ? std::numeric_limits<double>::infinity()
                                : built[i].distortion.value;
        }
        data_.push_back(std::move(d));
    }
}

double PhyRateModel::meanNoiseVar(const StreamData& d) const {
    if (d.self) return 1.0;
    return std::isfinite(d.condOverPhi) ? 1.0 + d.u2sq * d.condOverPhi
                                        : std::numeric_limits<double>::infinity();
}

const PhyRateModel::StreamData& PhyRateModel::lookup(const StreamId& id) const {
    const auto it = std::lower_bound(candidates_.begin(), candidates_.end(), id);
    if (it == candidates_.end() || *it != id)
        throw std::invalid_argument("stream is not a candidate this frame");
    return data_[static_cast<std::size_t>(it - candidates_.begin())];
}

std::vector<double> PhyRateModel::expectedStreamRates(const ScheduleSet& set) const {
    const int count = static_cast<int>(set.size());
    std::vector<const StreamData*> sel(count);
    for (int i = 0; i < count; ++i) sel[i] = &lookup(set[i]);

    std::vector<EffectiveStream> streams(count);
    for (int i = 0; i < count; ++i) {
        streams[i].id = set[i];
        streams[i].effVector = sel[i]->eff;
        streams[i].noiseVar = meanNoiseVar(*sel[i]);
    }
    const CMatrix w = rzf_precoder(streams, 0.0);

    // Cross gains are fading-independent; only the quantization noise moves
    // with the grid.
    RMatrix gain(count, count);
    for (int s = 0; s < count; ++s)
        for (int t = 0; t < count; ++t) gain(s, t) = std::norm(sel[s]->eff.dot(w.col(t)));

    const double power = 1.0 / count;
    std::vector<double> rates(count, 0.0);
    for (int s = 0; s < count; ++s) {
        const double signal = power * gain(s, s);
        double leak = 0.0;
        for (int t = 0; t < count; ++t)
            if (t != s) leak += power * gain(s, t);
        if (sel[s]->self) {
            rates[s] = std::log2(1.0 + signal / (noiseFloor_ + leak) / backoff_);
            continue;
        }
        for (std::size_t g = 0; g < grid_->points.size(); ++g) {
            const double nv = 1.0 + sel[s]->u2sq * sel[s]->condOverPhi / grid_->points[g];
            const double sinr = std::isfinite(nv) ? signal / (noiseFloor_ * nv + leak) : 0.0;
            rates[s] += grid_->probs[g] * std::log2(1.0 + sinr / backoff_);
        }
    }
    return rates;
}

CMatrix PhyRateModel::precoderFor(const ScheduleSet& set) const {
    std::vector<EffectiveStream> streams(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const StreamData& d = lookup(set[i]);
        streams[i].id = set[i];
        streams[i].effVector = d.eff;
        streams[i].noiseVar = meanNoiseVar(d);
    }
    return rzf_precoder(streams, 0.0);
}

}  // namespace coopsched
