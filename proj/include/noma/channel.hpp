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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace noma::channel {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Stream discriminator for the counter-based RNG so that eMBB users,
/// URLLC arrivals and auxiliary draws never share a substream.
enum class StreamKind : std::uint64_t { Embb = 0, Urllc = 1, Arrival = 2 };

/// Deterministic counter-based Gaussian source. Every (seed, slot, kind,
/// user) tuple owns an independent substream, so a single realization is
/// reproducible in isolation.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint64_t slot, StreamKind kind, std::uint64_t user);
    /// Standard complex Gaussian, unit variance (0.5 per component).
    std::complex<double> next_cgauss();
    double next_uniform();  // in (0,1)

  private:
    std::uint64_t state_;
};

/// i.i.d. CN(0,1) matrix for one user at one mini slot, rows = user antennas,
/// cols = base-station antennas.
CMat sample_user_matrix(std::uint64_t seed, int slot, StreamKind kind, int user, int n_rx,
                        int m_tx);

/// Per-slot channel draw for every eMBB user (indexed by global user id).
struct ChannelRealization {
    int slot = 0;
    std::uint64_t seed = 0;
    std::vector<CMat> embb_h;  // one N x M matrix per eMBB user
};

/// Samples all eMBB channels of one mini slot. Requires n_rx >= m_tx so the
/// reduced matrices keep a non-empty null space; throws otherwise.
ChannelRealization sample_channels(std::uint64_t seed, int slot, int num_embb, int n_rx, int m_tx);

/// Orthonormal basis of the null space of reduced^H (columns orthonormal,
/// reduced^H * basis ~ 0). `rank_deficient` marks inputs whose numerical rank
/// fell below the column count; the basis is then wider than n - cols.
struct NullSpace {
    CMat basis;
    bool rank_deficient = false;
};

NullSpace null_space_basis(const CMat& reduced);

/// Unit-norm detection vector for the target column of H, built by maximal
/// ratio combining inside the null space of the remaining columns. The global
/// phase is fixed so the largest-magnitude entry is real positive. Throws
/// std::domain_error when the projected channel is numerically zero.
struct Detection {
    CVec v;
    double gain = 0.0;  // |v^H h_target|^2
    bool rank_deficient = false;
};

Detection detection_vector(const CMat& h, int target_col);

/// Stable argsort of gains in decreasing order; ties keep the lower index
/// first.
std::vector<int> sic_order(std::span<const double> gains);

}  // namespace noma::channel
