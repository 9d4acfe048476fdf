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

#include <cmath>
#include <complex>

#include "doctest.h"
#include "noma/channel.hpp"

using namespace noma;

TEST_CASE("channel draws are deterministic per key and vary across slots") {
    const auto a = channel::sample_channels(7, 1, 4, 3, 3);
    const auto b = channel::sample_channels(7, 1, 4, 3, 3);
    const auto c = channel::sample_channels(7, 2, 4, 3, 3);
    for (int u = 0; u < 4; ++u) {
        CHECK(a.embb_h[u] == b.embb_h[u]);
        CHECK(a.embb_h[u] != c.embb_h[u]);
    }
    const auto d = channel::sample_channels(8, 1, 4, 3, 3);
    CHECK(a.embb_h[0] != d.embb_h[0]);
}

TEST_CASE("channel entries have unit second moment") {
    channel::GaussianStream g(123, 0, channel::StreamKind::Embb, 0);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += std::norm(g.next_cgauss());
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sample_channels rejects N < M") {
    CHECK_THROWS_AS(channel::sample_channels(1, 1, 2, 2, 3), std::invalid_argument);
}

TEST_CASE("null space of a 2x1 reduced matrix is the orthogonal direction") {
    channel::CMat reduced(2, 1);
    reduced << std::complex<double>(1.0 / std::sqrt(2.0), 0.0),
        std::complex<double>(1.0 / std::sqrt(2.0), 0.0);
    const auto ns = channel::null_space_basis(reduced);
    REQUIRE(ns.basis.cols() == 1);
    CHECK(!ns.rank_deficient);
    // basis proportional to (1,-1)/sqrt(2) up to phase
    const std::complex<double> ratio = ns.basis(0, 0) / ns.basis(1, 0);
    CHECK(std::abs(ratio + 1.0) < 1e-12);
    CHECK(std::abs(ns.basis.col(0).norm() - 1.0) < 1e-12);
}

TEST_CASE("null space residual and orthonormality on random matrices") {
    for (int trial = 0; trial < 50; ++trial) {
        const auto h = channel::sample_user_matrix(3, trial, channel::StreamKind::Embb, 5, 4, 2);
        const auto ns = channel::null_space_basis(h);
        REQUIRE(ns.basis.cols() == 2);
        CHECK((h.adjoint() * ns.basis).norm() < 1e-9);
        CHECK((ns.basis.adjoint() * ns.basis - channel::CMat::Identity(2, 2)).norm() < 1e-12);
    }
}

TEST_CASE("null space of the zero matrix spans everything") {
    const channel::CMat zero = channel::CMat::Zero(3, 2);
    const auto ns = channel::null_space_basis(zero);
    CHECK(ns.basis.cols() == 3);
    CHECK(ns.rank_deficient);
}

TEST_CASE("detection vector reduces to the target direction when already orthogonal") {
    channel::CMat h(2, 2);
    h << std::complex<double>(1, 0), std::complex<double>(1, 0), std::complex<double>(1, 0),
        std::complex<double>(-1, 0);
    // column 1 is orthogonal to column 0, so v aligns with it up to phase
    const auto det = channel::detection_vector(h, 1);
    const channel::CVec expected = h.col(1) / h.col(1).norm();
    CHECK(std::abs(det.v.dot(expected)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(det.gain == doctest::Approx(2.0));
}

TEST_CASE("detection vector maximizes the projected gain over the null space") {
    const auto h = channel::sample_user_matrix(17, 0, channel::StreamKind::Embb, 2, 4, 3);
    const auto det = channel::detection_vector(h, 1);
    channel::CMat reduced(4, 2);
    reduced.col(0) = h.col(0);
    reduced.col(1) = h.col(2);
    const auto ns = channel::null_space_basis(reduced);
    channel::GaussianStream g(99, 0, channel::StreamKind::Embb, 0);
    for (int trial = 0; trial < 100; ++trial) {
        channel::CVec z(ns.basis.cols());
        for (int i = 0; i < z.size(); ++i) z(i) = g.next_cgauss();
        const channel::CVec u = ns.basis * (z / z.norm());
        CHECK(std::norm(u.dot(h.col(1))) <= det.gain + 1e-9);
    }
}

TEST_CASE("detection vectors are unit norm, phase fixed, zero-forcing") {
    for (int trial = 0; trial < 100; ++trial) {
        const auto h = channel::sample_user_matrix(29, trial, channel::StreamKind::Urllc, 1, 3, 3);
        for (int c = 0; c < 3; ++c) {
            const auto det = channel::detection_vector(h, c);
            CHECK(std::abs(det.v.norm() - 1.0) < 1e-12);
            for (int f = 0; f < 3; ++f) {
                if (f == c) continue;
                CHECK(std::abs(det.v.dot(h.col(f))) < 1e-9);
            }
            // largest entry real positive
            int imax = 0;
            for (int i = 1; i < det.v.size(); ++i) {
                if (std::abs(det.v(i)) > std::abs(det.v(imax))) imax = i;
            }
            CHECK(det.v(imax).imag() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(det.v(imax).real() > 0.0);
        }
    }
}

TEST_CASE("sic_order sorts decreasingly with index tie-break") {
    CHECK(channel::sic_order(std::vector<double>{0.5, 2.0, 1.0}) == std::vector<int>{1, 2, 0});
    CHECK(channel::sic_order(std::vector<double>{3, 3, 1}) == std::vector<int>{0, 1, 2});
    CHECK(channel::sic_order(std::vector<double>{}) == std::vector<int>{});
}

TEST_CASE("sic_order is scale invariant and idempotent") {
    channel::GaussianStream g(55, 0, channel::StreamKind::Embb, 9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> gains;
        for (int i = 0; i < 6; ++i) gains.push_back(g.next_uniform() * 5.0);
        const auto order = channel::sic_order(gains);
        std::vector<double> scaled;
        for (double x : gains) scaled.push_back(3.7 * x);
        CHECK(channel::sic_order(scaled) == order);
        std::vector<double> sorted;
        for (int i : order) sorted.push_back(gains[i]);
        const auto ord2 = channel::sic_order(sorted);
        for (size_t i = 0; i < ord2.size(); ++i) CHECK(ord2[i] == static_cast<int>(i));
    }
}
