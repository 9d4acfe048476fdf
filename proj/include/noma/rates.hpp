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

#pragma once

#include <span>
#include <vector>

namespace noma::rates {

enum class UserKind { Embb, Urllc };

/// One active user inside a cluster after detection. `gain` is the scalar
/// channel seen through the detection vector, `noise` is the per-user
/// noise term (detection-vector norm squared over the linear SNR).
/// `rate_req` is the minimum Shannon rate for eMBB users and the
/// latency-implied finite-blocklength rate for URLLC users.
struct Member {
    int user_id = 0;
    UserKind kind = UserKind::Embb;
    double gain = 0.0;
    double noise = 0.0;
    double rate_req = 0.0;
};

/// Cluster state with members sorted by decreasing effective gain.
/// Construct via make_ordered() which enforces the ordering.
struct OrderedClusterState {
    int cluster_id = 0;
    std::vector<Member> members;
    double rho = 1.0;  // linear transmit SNR
};

/// Sorts members by decreasing gain (stable, ties keep input order) and
/// validates gains/noise. Throws std::invalid_argument on bad fields.
OrderedClusterState make_ordered(int cluster_id, std::vector<Member> members, double rho);

/// QoS parameters shared by all users of one scenario. Packet length is
/// stored in bits (the usual quotation "500 bytes" maps to 4000).
struct QosSpec {
    double r_min = 1.0;            // eMBB minimum rate, bit/s/Hz
    double d_max_s = 0.7e-3;       // URLLC delay budget, seconds
    double packet_bits = 4000.0;   // URLLC packet length F, bits
    double bandwidth_hz = 1.0e6;   // system bandwidth
    int blocklength = 168;         // codeword length in symbols
    double reliability_eps = 1e-5; // decoding error probability

    void validate() const;  // throws std::invalid_argument

    /// Rate needed so that packet_bits/(bandwidth*rate) <= d_max.
    double urllc_rate_requirement() const;
};

/// SINR of the user at `position` (0-based, decreasing-gain order), given
/// per-position powers. Interference comes from stronger-ordered users only.
double effective_sinr(const OrderedClusterState& state, std::span<const double> powers,
                      int position);

/// SINR when the decoder at position k detects the message of position
/// j >= k during interference cancellation (decoder k's gain, message j's
/// power and interference set). Throws on j < k.
double sinr_decode(const OrderedClusterState& state, std::span<const double> powers,
                   int decoder_position, int message_position);

double shannon_rate(double sinr);

/// Finite-blocklength dispersion, 1 - 1/(1+sinr)^2.
double dispersion(double sinr);

/// Normal-approximation achievable rate at blocklength b and error
/// probability eps, clamped at zero from below.
double fbl_rate(double sinr, int blocklength, double reliability_eps);

/// Inverse of the Gaussian tail function Q. Accurate to ~1e-12 relative.
double q_inv(double p);

/// The multiplier of sqrt(dispersion) in the finite-blocklength penalty.
double fbl_penalty_coeff(int blocklength, double reliability_eps);

bool latency_ok(const QosSpec& qos, double rate);

/// Jain's fairness index (sum r)^2 / (n sum r^2). Throws on empty or
/// all-zero input.
double jain_index(std::span<const double> user_rates);

/// Smallest SINR meeting the given finite-blocklength rate requirement,
/// found on the increasing branch of the rate curve. Returns +inf when the
/// requirement is unreachable below the search cap.
double sinr_for_fbl_rate(double rate_req, int blocklength, double reliability_eps);

}  // namespace noma::rates
