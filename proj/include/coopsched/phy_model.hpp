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

#ifndef COOPSCHED_PHY_MODEL_HPP
#define COOPSCHED_PHY_MODEL_HPP

#include "coopsched/phy.hpp"
#include "coopsched/scheduler.hpp"

namespace coopsched {

/// Expected MU-MIMO rates from the base station's channel estimates,
/// averaged over the D2D fading grid. The precoder is built once per
/// candidate set from mean-fading virtual users; fading only moves the
/// per-stream quantization noise. One instance per frame.
class PhyRateModel : public RateModel {
  public:
    PhyRateModel(const std::vector<CVector>& estimate, const RMatrix& pathloss,
                 std::vector<StreamId> candidates, const FadingGrid* grid, double snrBackoffDb,
                 double noiseFloor, int spatialCap);

    const std::vector<StreamId>& streams() const override { return candidates_; }
    int maxStreams() const override { return cap_; }
    std::vector<double> expectedStreamRates(const ScheduleSet& set) const override;

    /// Precoder the base station would apply for this set; evaluated later
    /// against the true channels for delivery accounting.
    CMatrix precoderFor(const ScheduleSet& set) const;

  private:
    struct StreamData {
        CVector eff;
        double u2sq = 0.0;
        double condOverPhi = 0.0;
        bool self = true;
    };

    double meanNoiseVar(const StreamData& d) const;
    const StreamData& lookup(const StreamId& id) const;

    std::vector<StreamId> candidates_;
    const FadingGrid* grid_;
    double backoff_;
    double noiseFloor_;
    int cap_;
    std::vector<StreamData> data_;
};

}  // namespace coopsched

#endif
