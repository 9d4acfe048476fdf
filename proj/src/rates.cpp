// noma-coexist: URLLC/eMBB coexistence scheduling for downlink MIMO-NOMA
// Copyright (C) 2026 the noma-coexist authors
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

#include "noma/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace noma::rates {

namespace {

constexpr double kLog2E = 1.4426950408889634;
constexpr double kSqrt2Pi = 2.5066282746310002;

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Acklam's rational approximation of the standard normal quantile,
// |relative error| < 1.15e-9 before refinement.
double norm_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double q_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("q_inv: p must lie strictly inside (0,1)");
    }
    // Q(x) = p  <=>  x = -Phi^{-1}(p); small p stays well conditioned.
    double x = -norm_quantile_approx(p);
    // One Newton step on Q(x) - p with the exact density.
    const double err = gaussian_q(x) - p;
    x += err * kSqrt2Pi * std::exp(0.5 * x * x);
    return x;
}

double shannon_rate(double sinr) {
    if (sinr < 0.0) throw std::domain_error("shannon_rate: negative sinr");
    return std::log2(1.0 + sinr);
}

double dispersion(double sinr) {
    if (sinr < 0.0) throw std::domain_error("dispersion: negative sinr");
    const double t = 1.0 + sinr;
    return 1.0 - 1.0 / (t * t);
}

double fbl_penalty_coeff(int blocklength, double reliability_eps) {
    if (blocklength < 1) throw std::domain_error("fbl: blocklength must be >= 1");
    if (!(reliability_eps > 0.0 && reliability_eps < 1.0)) {
        throw std::domain_error("fbl: reliability epsilon outside (0,1)");
    }
    return q_inv(reliability_eps) * kLog2E / std::sqrt(static_cast<double>(blocklength));
}

double fbl_rate(double sinr, int blocklength, double reliability_eps) {
    const double coeff = fbl_penalty_coeff(blocklength, reliability_eps);
    const double r = shannon_rate(sinr) - coeff * std::sqrt(dispersion(sinr));
    return std::max(r, 0.0);
}

double sinr_for_fbl_rate(double rate_req, int blocklength, double reliability_eps) {
    if (rate_req <= 0.0) return 0.0;
    const auto rate_at = [&](double s) { return fbl_rate(s, blocklength, reliability_eps); };
    double lo = 0.0;
    double hi = 1.0;
    while (rate_at(hi) < rate_req) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return std::numeric_limits<double>::infinity();
    }
    // rate_at(s) >= rate_req is monotone in s (the curve crosses a positive
    // requirement exactly once), so plain bisection applies.
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (rate_at(mid) >= rate_req ? hi : lo) = mid;
    }
    return hi;
}

void QosSpec::validate() const {
    if (r_min < 0.0) throw std::invalid_argument("qos.r_min must be >= 0");
    if (d_max_s <= 0.0) throw std::invalid_argument("qos.d_max must be > 0");
    if (packet_bits <= 0.0) throw std::invalid_argument("qos.packet_bits must be > 0");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("qos.bandwidth_hz must be > 0");
    if (blocklength < 1) throw std::invalid_argument("qos.blocklength must be >= 1");
    if (!(reliability_eps > 0.0 && reliability_eps < 0.5)) {
        throw std::invalid_argument("qos.reliability_eps must lie in (0, 0.5)");
    }
}

double QosSpec::urllc_rate_requirement() const { return packet_bits / (bandwidth_hz * d_max_s); }

bool latency_ok(const QosSpec& qos, double rate) {
    if (rate <= 0.0) return false;
    return qos.packet_bits / (qos.bandwidth_hz * rate) <= qos.d_max_s;
}

double jain_index(std::span<const double> user_rates) {
    if (user_rates.empty()) throw std::invalid_argument("jain_index: empty rate list");
    double sum = 0.0, sum_sq = 0.0;
    for (double r : user_rates) {
        sum += r;
        sum_sq += r * r;
    }
    if (sum_sq == 0.0) throw std::domain_error("jain_index: undefined for all-zero rates");
    return sum * sum / (static_cast<double>(user_rates.size()) * sum_sq);
}

OrderedClusterState make_ordered(int cluster_id, std::vector<Member> members, double rho) {
    if (rho <= 0.0) throw std::invalid_argument("cluster state: rho must be > 0");
    for (const Member& m : members) {
        if (!std::isfinite(m.gain) || m.gain < 0.0) {
            throw std::invalid_argument("cluster state: gains must be finite and nonnegative");
        }
        if (!(m.noise > 0.0)) {
            throw std::invalid_argument("cluster state: noise terms must be positive");
        }
    }
    std::stable_sort(members.begin(), members.end(),
                     [](const Member& a, const Member& b) { return a.gain > b.gain; });
    return OrderedClusterState{cluster_id, std::move(members), rho};
}

namespace {

void check_powers(const OrderedClusterState& state, std::span<const double> powers) {
    if (powers.size() != state.members.size()) {
        throw std::invalid_argument("powers not aligned with cluster members");
    }
    for (double p : powers) {
        if (!(p > 0.0)) throw std::domain_error("powers must be strictly positive");
    }
}

}  // namespace

double sinr_decode(const OrderedClusterState& state, std::span<const double> powers,
                   int decoder_position, int message_position) {
    check_powers(state, powers);
    const int n = static_cast<int>(state.members.size());
    if (decoder_position < 0 || decoder_position >= n || message_position >= n) {
        throw std::invalid_argument("sinr_decode: position out of range");
    }
    if (message_position < decoder_position) {
        throw std::invalid_argument("sinr_decode: message decoded after the decoder's own slot");
    }
    const Member& decoder = state.members[decoder_position];
    double interference = 0.0;
    for (int l = 0; l < message_position; ++l) interference += powers[l];
    return decoder.gain * powers[message_position] /
           (decoder.gain * interference + decoder.noise);
}

double effective_sinr(const OrderedClusterState& state, std::span<const double> powers,
                      int position) {
    return sinr_decode(state, powers, position, position);
}

}  // namespace noma::rates
