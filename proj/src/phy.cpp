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

#include "coopsched/phy.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <iostream>
#include <limits>

namespace coopsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log2p(double x) { return std::log2(1.0 + x); }

/// Real determinant of a 2x2 complex matrix (Hermitian-derived inputs).
double det2(const Eigen::Matrix2cd& a) {
    return (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).real();
}

/// diag(1, 1/(1+D)); the unavailable state kills the relay row entirely.
Eigen::Matrix2cd inverseNoiseCov(const Distortion& d) {
    Eigen::Matrix2cd kinv = Eigen::Matrix2cd::Identity();
    kinv(1, 1) = d.unavailable ? 0.0 : 1.0 / (1.0 + d.value);
    return kinv;
}

struct PairSpectrum {
    double normI, normJ;   // ||h_i||^2, ||h_j||^2
    Complex cross;         // h_i^* h_j
    double topEig;         // s_1^2
    Eigen::Vector2cd topVec;
};

/// Top eigenpair of the 2x2 Gram [ [a, c], [c*, b] ] of the stacked pair.
PairSpectrum pair_spectrum(const CVector& hi, const CVector& hj) {
    PairSpectrum p;
    p.normI = hi.squaredNorm();
    p.normJ = hj.squaredNorm();
    p.cross = hi.dot(hj);  // conjugate in the first argument
    const double a = p.normI, b = p.normJ;
    const double c2 = std::norm(p.cross);
    const double disc = std::sqrt(std::max((a - b) * (a - b) + 4.0 * c2, 0.0));
    p.topEig = 0.5 * (a + b + disc);
    if (c2 > 0.0 || std::abs(a - b) > 0.0) {
        if (c2 > 0.0) {
            Eigen::Vector2cd v(p.cross, Complex(p.topEig - a, 0.0));
            p.topVec = v / v.norm();
        } else {
            p.topVec = a >= b ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
        }
    } else {
        p.topVec = Eigen::Vector2cd(1.0, 0.0);
    }
    return p;
}

}  // namespace

double conditional_variance(const Eigen::Matrix2cd& sigma) {
    const double s11 = sigma(0, 0).real();
    const double s22 = sigma(1, 1).real();
    if (s11 <= 0.0) return std::max(s22, 0.0);
    const double v = s22 - std::norm(sigma(1, 0)) / s11;
    return std::max(v, 0.0);
}

Distortion wz_distortion(double condVar, Complex g, bool selfPair) {
    if (selfPair) return Distortion::zero();
    const double g2 = std::norm(g);
    if (g2 == 0.0) return Distortion::infinite();
    return Distortion::finite(condVar / g2);
}

double mimo_rate(const CMatrix& channel, const Distortion& distortion, const CMatrix& inputCov) {
    if (inputCov.trace().real() > 1.0 + 1e-9)
        throw std::invalid_argument("input covariance trace exceeds the power budget");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(inputCov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("input covariance must be PSD");

    const Eigen::Matrix2cd inner =
        Eigen::Matrix2cd::Identity() +
        inverseNoiseCov(distortion) * (channel * inputCov * channel.adjoint());
    // det >= 1 holds exactly; the clamp only absorbs rounding.
    return std::log2(std::max(det2(inner), 1.0));
}

CovarianceOpt optimize_input_covariance(const CMatrix& channel, const Distortion& distortion) {
    const int m = static_cast<int>(channel.cols());
    Eigen::Matrix2cd kinvHalf = Eigen::Matrix2cd::Identity();
    kinvHalf(1, 1) = distortion.unavailable ? 0.0 : 1.0 / std::sqrt(1.0 + distortion.value);
    const CMatrix effective = kinvHalf * channel;

    Eigen::JacobiSVD<CMatrix> svd(effective, Eigen::ComputeThinV);
    const int modes = static_cast<int>(svd.singularValues().size());
    std::vector<double> gain(modes);
    for (int d = 0; d < modes; ++d) {
        const double s = svd.singularValues()(d);
        gain[d] = s * s;
    }

    CovarianceOpt out;
    const double gmax = *std::max_element(gain.begin(), gain.end());
    if (gmax <= 0.0) {
        out.inputCov = CMatrix::Identity(m, m) / m;
        out.rate = 0.0;
        return out;
    }

    // Bisection on the water level: total power is monotone in mu.
    const auto totalPower = [&](double mu) {
        double p = 0.0;
        for (double g : gain)
            if (g > 0.0) p += std::max(mu - 1.0 / g, 0.0);
        return p;
    };
    double lo = 0.0, hi = 1.0 + 1.0 / gmax;
    while (totalPower(hi) < 1.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (totalPower(mid) < 1.0 ? lo : hi) = mid;
    }
    const double mu = 0.5 * (lo + hi);

    CMatrix q = CMatrix::Zero(m, m);
    double rate = 0.0;
    double trace = 0.0;
    for (int d = 0; d < modes; ++d) {
        if (gain[d] <= 0.0) continue;
        const double p = std::max(mu - 1.0 / gain[d], 0.0);
        if (p <= 0.0) continue;
        const CVector v = svd.matrixV().col(d);
        q += p * (v * v.adjoint());
        rate += log2p(gain[d] * p);
        trace += p;
    }
    if (trace > 1.0) q /= trace;  // bisection residue
    out.inputCov = q;
    out.rate = rate;
    return out;
}

std::pair<double, double> stream_rates(const CMatrix& channel, const Distortion& distortion,
                                       double power1, double power2) {
    if (power1 + power2 > 1.0 + 1e-9)
        throw std::invalid_argument("stream powers exceed the power budget");
    Eigen::JacobiSVD<CMatrix> svd(channel, Eigen::ComputeFullU);
    const int modes = static_cast<int>(svd.singularValues().size());
    const double powers[2] = {power1, power2};
    double rates[2] = {0.0, 0.0};
    for (int d = 0; d < 2; ++d) {
        const double s = d < modes ? svd.singularValues()(d) : 0.0;
        const double u2 = std::norm(svd.matrixU()(1, d));
        if (distortion.unavailable) {
            rates[d] = u2 == 0.0 ? log2p(s * s * powers[d]) : 0.0;
        } else {
            rates[d] = log2p(s * s * powers[d] / (1.0 + u2 * distortion.value));
        }
    }
    return {rates[0], rates[1]};
}

double top_singular_closed_form(const CVector& hi, const CVector& hj) {
    const double a = hi.squaredNorm();
    const double b = hj.squaredNorm();
    if (a == 0.0 || b == 0.0) return std::max(a, b);
    const double cos2 = 2.0 * std::norm(hi.dot(hj)) / (a * b) - 1.0;
    const double radicand = std::max(a * a + b * b + 2.0 * a * b * cos2, 0.0);
    return 0.5 * (a + b + std::sqrt(radicand));
}

double cutset_bound(const CMatrix& channel, Complex sideGain) {
    const double mimoCut = optimize_input_covariance(channel, Distortion::zero()).rate;
    const double directCut =
        log2p(channel.row(0).squaredNorm()) + log2p(std::norm(sideGain));
    return std::min(mimoCut, directCut);
}

RateReport gap_check(const CMatrix& channel, Complex sideGain) {
    RateReport report;
    const auto ideal = optimize_input_covariance(channel, Distortion::zero());

    // Conditional variance induced by the ideal-cut covariance:
    // sigma^2_{2|1} = det(I + H Q H*) / (1 + ||h_1||^2).
    const Eigen::Matrix2cd cov = Eigen::Matrix2cd::Identity() +
                                 (channel * ideal.inputCov * channel.adjoint());
    const double direct = channel.row(0).squaredNorm();
    const double condVar = std::max(det2(cov), 0.0) / (1.0 + direct);

    const Distortion d = wz_distortion(condVar, sideGain);
    report.rMimo = mimo_rate(channel, d, ideal.inputCov);
    report.cutset = std::min(ideal.rate, log2p(direct) + log2p(std::norm(sideGain)));
    report.gap = report.cutset - report.rMimo;
    report.theoremViolated = report.gap < -1e-9 || report.gap > 2.0 + 1e-9;

    const auto [r1, r2] = stream_rates(channel, d, 0.5, 0.5);
    report.stream1 = r1;
    report.stream2 = r2;
    return report;
}

namespace {

/// Shared construction; gainSquared(i, j) supplies |g_ij|^2.
template <typename GainFn>
std::vector<EffectiveStream> build_virtual_channels(const ScheduleSet& schedule,
                                                    const std::vector<CVector>& downlink,
                                                    const RMatrix& pathloss, GainFn gainSquared) {
    std::vector<EffectiveStream> out;
    out.reserve(schedule.size());
    for (const StreamId& id : schedule) {
        if (id.selfPair() && id.stream == 2)
            throw std::invalid_argument("self pairs carry a single stream");
        EffectiveStream es;
        es.id = id;
        const CVector& hi = downlink[id.dest];
        if (id.selfPair()) {
            es.effVector = hi;
            es.noiseVar = 1.0;
            es.singularValue = hi.norm();
            es.leftColumn = Eigen::Vector2cd(1.0, 0.0);
            es.distortion = Distortion::zero();
            out.push_back(std::move(es));
            continue;
        }
        const CVector& hj = downlink[id.relay];
        const int m = static_cast<int>(hi.size());
        CMatrix stacked(2, m);
        stacked.row(0) = hi.adjoint();
        stacked.row(1) = hj.adjoint();
        Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullU);
        const int d = id.stream - 1;
        const int modes = static_cast<int>(svd.singularValues().size());
        es.singularValue = d < modes ? svd.singularValues()(d) : 0.0;
        es.leftColumn = svd.matrixU().col(d);
        es.effVector = stacked.adjoint() * es.leftColumn;

        // Quantization distortion for isotropic signaling: the precoder is
        // not known when the virtual users are formed.
        Eigen::Matrix2cd sigma =
            Eigen::Matrix2cd::Identity() + (stacked * stacked.adjoint()) / double(m);
        const double condVar = conditional_variance(sigma);
        const double g2 = gainSquared(id.dest, id.relay);
        es.distortion = g2 > 0.0 ? Distortion::finite(condVar / g2) : Distortion::infinite();
        es.noiseVar = es.distortion.unavailable
                          ? (std::norm(es.leftColumn(1)) == 0.0 ? 1.0 : kInf)
                          : 1.0 + std::norm(es.leftColumn(1)) * es.distortion.value;
        out.push_back(std::move(es));
    }
    return out;
}

}  // namespace

std::vector<EffectiveStream> virtual_channels(const ScheduleSet& schedule,
                                              const PairChannels& channels) {
    const auto& fading = *channels.fading;
    const auto& pathloss = *channels.pathloss;
    return build_virtual_channels(schedule, *channels.downlink, pathloss,
                                  [&](int i, int j) {
                                      return pathloss(i, j) * std::norm(fading(i, j));
                                  });
}

std::vector<EffectiveStream> virtual_channels_fixed_fading(const ScheduleSet& schedule,
                                                           const std::vector<CVector>& downlink,
                                                           const RMatrix& pathloss,
                                                           double fadingPower) {
    return build_virtual_channels(schedule, downlink, pathloss, [&](int i, int j) {
        return pathloss(i, j) * fadingPower;
    });
}

CMatrix rzf_precoder(const std::vector<EffectiveStream>& streams, double regularization) {
    const int count = static_cast<int>(streams.size());
    const int m = static_cast<int>(streams.front().effVector.size());
    if (count > m) throw std::invalid_argument("more streams than spatial dimensions");

    CMatrix rows(count, m);
    double meanGain = 0.0;
    for (int s = 0; s < count; ++s) {
        const double nv = streams[s].noiseVar;
        const double scale = std::isfinite(nv) ? 1.0 / std::sqrt(nv) : 0.0;
        rows.row(s) = scale * streams[s].effVector.adjoint();
        meanGain += rows.row(s).squaredNorm();
    }
    meanGain /= count;
    double lambda = regularization;
    if (lambda <= 0.0) lambda = meanGain > 0.0 ? count / meanGain : 1.0;

    const CMatrix gram = rows * rows.adjoint() + lambda * CMatrix::Identity(count, count);
    Eigen::LLT<CMatrix> llt(gram);
    CMatrix w;
    if (llt.info() == Eigen::Success) {
        // W = A^H (A A^H + lambda I)^-1, via one Hermitian solve
        w = llt.solve(rows).adjoint();
    } else {
        std::clog << "rzf_precoder: singular regularized Gram, using pseudo-inverse\n";
        w = rows.adjoint() *
            gram.completeOrthogonalDecomposition().pseudoInverse();
    }
    for (int s = 0; s < count; ++s) {
        const double norm = w.col(s).norm();
        if (norm > 0.0) w.col(s) /= norm;
    }
    return w;
}

std::vector<double> precoded_stream_rates(const std::vector<EffectiveStream>& streams,
                                          const CMatrix& precoder, double snrBackoffDb,
                                          const std::vector<double>* noiseVarOverride,
                                          double noiseFloor) {
    const int count = static_cast<int>(streams.size());
    const double backoff = std::pow(10.0, snrBackoffDb / 10.0);
    const double power = 1.0 / count;
    std::vector<double> rates(count);
    for (int s = 0; s < count; ++s) {
        const CVector& h = streams[s].effVector;
        double leak = 0.0;
        double signal = 0.0;
        for (int t = 0; t < count; ++t) {
            const double gain = std::norm(h.dot(precoder.col(t)));
            (t == s ? signal : leak) += power * gain;
        }
        const double nv = noiseVarOverride ? (*noiseVarOverride)[s] : streams[s].noiseVar;
        const double sinr = std::isfinite(nv) ? signal / (noiseFloor * nv + leak) : 0.0;
        rates[s] = log2p(sinr / backoff);
    }
    return rates;
}

std::vector<double> mu_mimo_rates(const std::vector<EffectiveStream>& streams,
                                  double regularization, double snrBackoffDb,
                                  double noiseFloor) {
    if (streams.empty()) return {};
    const CMatrix w = rzf_precoder(streams, regularization);
    return precoded_stream_rates(streams, w, snrBackoffDb, nullptr, noiseFloor);
}

double coop_snr(const CVector& hi, const CVector& hj, double pathloss, double fadingPower) {
    const PairSpectrum p = pair_spectrum(hi, hj);
    const double u2 = std::norm(p.topVec(1));
    if (u2 == 0.0) return p.topEig;
    const double g2 = pathloss * fadingPower;
    if (g2 <= 0.0) return 0.0;
    // Conditional relay-output variance under top-stream beamforming.
    const double u1 = std::norm(p.topVec(0));
    const double condVar = (1.0 + p.topEig) / (1.0 + p.topEig * u1);
    return p.topEig / (1.0 + u2 * condVar / g2);
}

SnrMetrics snr_metrics(int dest, const std::vector<int>& candidates,
                       const std::vector<CVector>& downlink, const RMatrix& pathloss,
                       const FadingGrid& grid) {
    SnrMetrics metrics;
    metrics.noncoopSnr = downlink[dest].squaredNorm();
    metrics.coopSnrPerRelay.resize(candidates.size(), 0.0);
    double best = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const int j = candidates[c];
        const double phi = pathloss(dest, j);
        if (phi <= 0.0) continue;  // dead link, excluded from selection
        // One spectrum per pair; only the side-link gain moves over the grid.
        const PairSpectrum p = pair_spectrum(downlink[dest], downlink[j]);
        const double u2 = std::norm(p.topVec(1));
        double mean = 0.0;
        if (u2 == 0.0) {
            mean = p.topEig;
        } else {
            const double u1 = std::norm(p.topVec(0));
            const double condVar = (1.0 + p.topEig) / (1.0 + p.topEig * u1);
            for (std::size_t g = 0; g < grid.points.size(); ++g) {
                const double g2 = phi * grid.points[g];
                mean += grid.probs[g] * p.topEig / (1.0 + u2 * condVar / g2);
            }
        }
        metrics.coopSnrPerRelay[c] = mean;
        if (mean > best) {
            best = mean;
            metrics.bestRelay = static_cast<int>(c);
        }
    }
    return metrics;
}

}  // namespace coopsched
