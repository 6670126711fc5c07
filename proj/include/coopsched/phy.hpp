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

#ifndef COOPSCHED_PHY_HPP
#define COOPSCHED_PHY_HPP

#include <optional>
#include <utility>
#include <vector>

#include "coopsched/fading.hpp"
#include "coopsched/types.hpp"

namespace coopsched {

/// Wyner-Ziv quantization distortion at the relay. A dead side channel is an
/// explicit "unavailable" state rather than a floating-point infinity so the
/// rate formulas can degrade to the direct-link-only rate deliberately.
struct Distortion {
    double value = 0.0;
    bool unavailable = false;

    static Distortion zero() { return {0.0, false}; }
    static Distortion finite(double d) { return {d, false}; }
    static Distortion infinite() { return {0.0, true}; }
};

/// Schur complement Sigma22 - Sigma21 Sigma11^-1 Sigma12 of a 2x2 Hermitian
/// PSD matrix: the conditional variance of output 2 given output 1. A
/// singular Sigma11 carries no conditioning information and returns Sigma22.
double conditional_variance(const Eigen::Matrix2cd& sigma);

/// D = sigma^2_{2|1} / |g|^2; self pairs quantize nothing (D = 0), a dead
/// link (g = 0) yields the unavailable state.
Distortion wz_distortion(double condVar, Complex g, bool selfPair = false);

/// log2 det(I2 + K^-1 H Q H*) with K = diag(1, 1 + D) for the effective
/// 2xM MIMO channel formed by destination + quantized relay observation.
/// Unavailable D uses K^-1 = diag(1, 0), i.e. only the direct row counts.
double mimo_rate(const CMatrix& channel, const Distortion& distortion, const CMatrix& inputCov);

struct CovarianceOpt {
    CMatrix inputCov;  ///< optimal Q, trace <= 1
    double rate = 0.0;
};

/// Water-filling over the singular modes of K^-1/2 H subject to tr(Q) <= 1.
CovarianceOpt optimize_input_covariance(const CMatrix& channel, const Distortion& distortion);

/// Per-stream rates log2(1 + s_d^2 P_d / (1 + |u_2d|^2 D)) from the SVD of H
/// taken directly (not of the noise-whitened channel).
std::pair<double, double> stream_rates(const CMatrix& channel, const Distortion& distortion,
                                       double power1, double power2);

/// Squared top singular value of [h_i h_j]* in closed form from the norms
/// and the principal angle; zero vectors fall back to the larger norm.
double top_singular_closed_form(const CVector& hi, const CVector& hj);

/// min of the broadcast MIMO cut and the direct-plus-side-link cut.
double cutset_bound(const CMatrix& channel, Complex sideGain);

struct RateReport {
    double rMimo = 0.0;
    double stream1 = 0.0;
    double stream2 = 0.0;
    double cutset = 0.0;
    double gap = 0.0;
    bool theoremViolated = false;  ///< gap outside [-1e-9, 2 + 1e-9]
};

/// Evaluate the cooperation rate against the cut-set bound for one pair.
/// The distortion is induced by the covariance maximizing the ideal MIMO
/// cut, via sigma^2_{2|1} = det(I + H Q H*) / (1 + ||h_1||^2).
RateReport gap_check(const CMatrix& channel, Complex sideGain);

/// A scheduled stream reduced to a single-antenna virtual user.
struct EffectiveStream {
    StreamId id;
    CVector effVector;              ///< htilde, length M
    double noiseVar = 1.0;          ///< 1 + |u_d(2)|^2 D
    double singularValue = 0.0;     ///< s_d of the stacked pair channel
    Eigen::Vector2cd leftColumn;    ///< u_d
    Distortion distortion;
};

/// Interface the virtual-channel builder uses to look up channels and gains.
struct PairChannels {
    const std::vector<CVector>* downlink = nullptr;  ///< h_i per user
    const RMatrix* pathloss = nullptr;               ///< phi_ij
    const CMatrix* fading = nullptr;                 ///< zeta_ij
};

/// Build the virtual single-antenna users for a schedule set: SVD of each
/// stacked pair channel, effective vector htilde = H* u_d, and quantization
/// noise variance. Self pairs pass the direct channel through unchanged.
std::vector<EffectiveStream> virtual_channels(const ScheduleSet& schedule,
                                              const PairChannels& channels);

/// As above with the fading power of every D2D link overridden (used when
/// averaging over the unknown fading state).
std::vector<EffectiveStream> virtual_channels_fixed_fading(const ScheduleSet& schedule,
                                                           const std::vector<CVector>& downlink,
                                                           const RMatrix& pathloss,
                                                           double fadingPower);

/// Regularized zero-forcing precoder over noise-whitened virtual channels,
/// unit-norm columns. regularization <= 0 selects |S| / mean ||htilde||^2.
/// A singular regularized Gram matrix falls back to the pseudo-inverse.
CMatrix rzf_precoder(const std::vector<EffectiveStream>& streams, double regularization);

/// Per-stream rates log2(1 + SINR / backoff) under equal power 1/|S|,
/// with optional per-stream noise-variance overrides (fading averaging) and
/// a noise-floor multiplier standing in for inter-cell interference.
std::vector<double> precoded_stream_rates(const std::vector<EffectiveStream>& streams,
                                          const CMatrix& precoder, double snrBackoffDb,
                                          const std::vector<double>* noiseVarOverride = nullptr,
                                          double noiseFloor = 1.0);

/// Convenience wrapper: precoder + rates in one call.
std::vector<double> mu_mimo_rates(const std::vector<EffectiveStream>& streams,
                                  double regularization, double snrBackoffDb,
                                  double noiseFloor = 1.0);

/// Cooperative SNR of pair (i, j) for a realized fading power z = |zeta|^2,
/// with all transmit power beamformed on the top stream.
double coop_snr(const CVector& hi, const CVector& hj, double pathloss, double fadingPower);

struct SnrMetrics {
    std::vector<double> coopSnrPerRelay;  ///< E over fading, indexed like candidates
    double noncoopSnr = 0.0;              ///< ||h_i||^2
    int bestRelay = -1;                   ///< index into candidates, -1 if none usable
};

/// Expected cooperative SNR per candidate relay (expectation over the D2D
/// fading grid given path loss and relay channel) and the non-cooperative
/// baseline. Dead links (phi = 0) are excluded from the argmax.
SnrMetrics snr_metrics(int dest, const std::vector<int>& candidates,
                       const std::vector<CVector>& downlink, const RMatrix& pathloss,
                       const FadingGrid& grid);

}  // namespace coopsched

#endif
