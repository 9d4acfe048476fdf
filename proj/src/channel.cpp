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

#include "noma/channel.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace noma::channel {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t absorb(std::uint64_t state, std::uint64_t value) {
    std::uint64_t s = state ^ (value + 0x9E3779B97F4A7C15ull);
    return splitmix64(s);
}

}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t slot, StreamKind kind,
                               std::uint64_t user) {
    std::uint64_t s = absorb(seed, 0x6e6f6d61u);  // domain separation constant
    s = absorb(s, slot);
    s = absorb(s, static_cast<std::uint64_t>(kind));
    s = absorb(s, user);
    state_ = s;
}

double GaussianStream::next_uniform() {
    const std::uint64_t z = splitmix64(state_);
    return (static_cast<double>(z >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

std::complex<double> GaussianStream::next_cgauss() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

CMat sample_user_matrix(std::uint64_t seed, int slot, StreamKind kind, int user, int n_rx,
                        int m_tx) {
    GaussianStream g(seed, static_cast<std::uint64_t>(slot), kind,
                     static_cast<std::uint64_t>(user));
    CMat h(n_rx, m_tx);
    for (int c = 0; c < m_tx; ++c) {
        for (int r = 0; r < n_rx; ++r) h(r, c) = g.next_cgauss();
    }
    return h;
}

ChannelRealization sample_channels(std::uint64_t seed, int slot, int num_embb, int n_rx,
                                   int m_tx) {
    if (n_rx < m_tx) {
        throw std::invalid_argument(
            "sample_channels: user antennas must be >= base-station antennas (N >= M)");
    }
    ChannelRealization out;
    out.slot = slot;
    out.seed = seed;
    out.embb_h.reserve(num_embb);
    for (int k = 0; k < num_embb; ++k) {
        out.embb_h.push_back(sample_user_matrix(seed, slot, StreamKind::Embb, k, n_rx, m_tx));
    }
    return out;
}

NullSpace null_space_basis(const CMat& reduced) {
    const int n = static_cast<int>(reduced.rows());
    const int cols = static_cast<int>(reduced.cols());
    if (cols == 0) {
        NullSpace ns;
        ns.basis = CMat::Identity(n, n);
        return ns;
    }
    Eigen::JacobiSVD<CMat> svd(reduced, Eigen::ComputeFullU);
    const auto& sigma = svd.singularValues();
    const double cutoff = 1e-10 * (sigma.size() > 0 ? sigma(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff) ++rank;
    }
    NullSpace ns;
    ns.basis = svd.matrixU().rightCols(n - rank);
    ns.rank_deficient = rank < std::min(n, cols);
    return ns;
}

Detection detection_vector(const CMat& h, int target_col) {
    const int n = static_cast<int>(h.rows());
    const int m = static_cast<int>(h.cols());
    if (target_col < 0 || target_col >= m) {
        throw std::invalid_argument("detection_vector: target column out of range");
    }
    if (n < m) {
        throw std::invalid_argument("detection_vector: needs N >= M for a non-empty null space");
    }
    CMat reduced(n, m - 1);
    for (int c = 0, o = 0; c < m; ++c) {
        if (c == target_col) continue;
        reduced.col(o++) = h.col(c);
    }
    const NullSpace ns = null_space_basis(reduced);
    const CVec target = h.col(target_col);
    const CVec projected = ns.basis.adjoint() * target;
    const double pnorm = projected.norm();
    if (pnorm < 1e-14) {
        throw std::domain_error("detection_vector: degenerate user, projected gain is zero");
    }
    CVec v = ns.basis * (projected / pnorm);
    v /= v.norm();
    // Fix the global phase: largest-magnitude entry becomes real positive.
    int imax = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    }
    v *= std::conj(v(imax)) / std::abs(v(imax));

    Detection det;
    det.v = std::move(v);
    const std::complex<double> resp = det.v.dot(target);
    det.gain = std::norm(resp);
    det.rank_deficient = ns.rank_deficient;
    return det;
}

std::vector<int> sic_order(std::span<const double> gains) {
    for (double g : gains) {
        if (!std::isfinite(g) || g < 0.0) {
            throw std::invalid_argument("sic_order: gains must be finite and nonnegative");
        }
    }
    std::vector<int> order(gains.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gains[a] > gains[b]; });
    return order;
}

}  // namespace noma::channel
