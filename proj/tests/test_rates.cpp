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
#include <vector>

#include "doctest.h"
#include "noma/channel.hpp"
#include "noma/rates.hpp"

using namespace noma;

namespace {

// Independent root finder on the Gaussian tail for q_inv checks.
double q_inv_bisect(double p) {
    double lo = -42.0, hi = 42.0;
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
    }
    return hi;
}

rates::OrderedClusterState two_member_state() {
    std::vector<rates::Member> members{
        {0, rates::UserKind::Embb, 4.0, 0.1, 0.0},
        {1, rates::UserKind::Embb, 1.0, 0.1, 0.0},
    };
    return rates::make_ordered(0, members, 10.0);
}

}  // namespace

TEST_CASE("effective sinr, single member") {
    std::vector<rates::Member> members{{0, rates::UserKind::Embb, 2.0, 1.0 / 100.0, 0.0}};
    const auto state = rates::make_ordered(0, members, 100.0);
    const std::vector<double> powers{0.5};
    CHECK(rates::effective_sinr(state, powers, 0) == doctest::Approx(100.0));
}

TEST_CASE("effective sinr, two members by direct substitution") {
    const auto state = two_member_state();
    const std::vector<double> powers{0.1, 0.2};
    CHECK(rates::effective_sinr(state, powers, 1) == doctest::Approx(1.0));
}

TEST_CASE("effective sinr equals an independent re-evaluation on random clusters") {
    channel::GaussianStream g(3, 0, channel::StreamKind::Embb, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<rates::Member> members;
        std::vector<double> powers;
        for (int i = 0; i < 4; ++i) {
            members.push_back(
                {i, rates::UserKind::Embb, 5.0 * g.next_uniform(), 0.01 + g.next_uniform(), 0.0});
            powers.push_back(0.05 + g.next_uniform());
        }
        const auto state = rates::make_ordered(0, members, 50.0);
        for (int k = 0; k < 4; ++k) {
            // term-by-term evaluation straight from the ordered definition
            double interference = 0.0;
            for (int l = 0; l < k; ++l) interference += state.members[k].gain * powers[l];
            const double expect =
                state.members[k].gain * powers[k] / (interference + state.members[k].noise);
            CHECK(rates::effective_sinr(state, powers, k) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("effective sinr rejects nonpositive powers") {
    const auto state = two_member_state();
    CHECK_THROWS_AS(rates::effective_sinr(state, std::vector<double>{0.1, 0.0}, 0),
                    std::domain_error);
}

TEST_CASE("effective sinr is scale-free in joint power/noise scaling") {
    const auto base = two_member_state();
    const std::vector<double> p1{0.1, 0.2};
    const std::vector<double> p2{0.4, 0.8};
    std::vector<rates::Member> scaled = base.members;
    for (auto& m : scaled) m.noise *= 4.0;
    const auto state2 = rates::make_ordered(0, scaled, base.rho);
    for (int k = 0; k < 2; ++k) {
        CHECK(rates::effective_sinr(base, p1, k) ==
              doctest::Approx(rates::effective_sinr(state2, p2, k)).epsilon(1e-12));
    }
}

TEST_CASE("sinr_decode coincides with effective sinr on the diagonal") {
    const auto state = two_member_state();
    const std::vector<double> powers{0.3, 0.2};
    CHECK(rates::sinr_decode(state, powers, 0, 0) ==
          doctest::Approx(rates::effective_sinr(state, powers, 0)));
    CHECK(rates::sinr_decode(state, powers, 1, 1) ==
          doctest::Approx(rates::effective_sinr(state, powers, 1)));
}

TEST_CASE("sinr_decode substitution and order violation") {
    std::vector<rates::Member> members{
        {0, rates::UserKind::Embb, 4.0, 0.05, 0.0},
        {1, rates::UserKind::Embb, 1.0, 0.05, 0.0},
    };
    const auto state = rates::make_ordered(0, members, 1.0);
    const std::vector<double> powers{0.3, 0.2};
    CHECK(rates::sinr_decode(state, powers, 0, 1) == doctest::Approx(0.64));
    CHECK_THROWS_AS(rates::sinr_decode(state, powers, 1, 0), std::invalid_argument);
}

TEST_CASE("sinr_decode decreases in the interference prefix") {
    channel::GaussianStream g(4, 0, channel::StreamKind::Embb, 2);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<rates::Member> members;
        for (int i = 0; i < 3; ++i) {
            members.push_back({i, rates::UserKind::Embb, 1.0 + g.next_uniform(), 0.02, 0.0});
        }
        const auto state = rates::make_ordered(0, members, 10.0);
        std::vector<double> powers{0.2 + g.next_uniform() * 0.1, 0.2, 0.2};
        const double before = rates::sinr_decode(state, powers, 0, 2);
        powers[0] += 0.5;  // more interference ahead of message 2
        CHECK(rates::sinr_decode(state, powers, 0, 2) < before);
    }
}

TEST_CASE("shannon rate basics") {
    CHECK(rates::shannon_rate(0.0) == doctest::Approx(0.0));
    CHECK(rates::shannon_rate(1.0) == doctest::Approx(1.0));
    CHECK(rates::shannon_rate(3.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(rates::shannon_rate(-0.1), std::domain_error);
}

TEST_CASE("dispersion values and monotonicity") {
    CHECK(rates::dispersion(0.0) == doctest::Approx(0.0));
    CHECK(rates::dispersion(1.0) == doctest::Approx(0.75));
    CHECK(rates::dispersion(3.0) == doctest::Approx(0.9375));
    double prev = -1.0;
    for (double s = 0.0; s < 50.0; s += 0.25) {
        const double c = rates::dispersion(s);
        CHECK(c > prev);
        CHECK(c < 1.0);
        prev = c;
    }
}

TEST_CASE("q_inv matches the bisection oracle") {
    CHECK(rates::q_inv(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rates::q_inv(0.025) == doctest::Approx(1.95996).epsilon(1e-5));
    CHECK(rates::q_inv(1e-5) == doctest::Approx(4.26489).epsilon(1e-5));
    for (double p : {0.9, 0.6, 0.3, 0.05, 1e-2, 1e-4, 1e-6, 1e-8}) {
        const double expect = q_inv_bisect(p);
        CHECK(rates::q_inv(p) == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK_THROWS_AS(rates::q_inv(0.0), std::domain_error);
    CHECK_THROWS_AS(rates::q_inv(1.0), std::domain_error);
}

TEST_CASE("finite blocklength rate") {
    // eps = 0.5 removes the penalty entirely
    CHECK(rates::fbl_rate(3.0, 168, 0.5) == doctest::Approx(rates::shannon_rate(3.0)));
    // huge blocklength converges to the Shannon rate
    CHECK(rates::fbl_rate(3.0, 1000000000, 1e-5) == doctest::Approx(2.0).epsilon(1e-3));
    // frozen value recomputed with the high-precision inverse-Q oracle
    const double expect = 2.0 - std::sqrt(0.9375 / 168.0) * q_inv_bisect(1e-5) * std::log2(std::exp(1.0));
    CHECK(expect == doctest::Approx(1.5404).epsilon(1e-4));
    CHECK(rates::fbl_rate(3.0, 168, 1e-5) == doctest::Approx(expect).epsilon(1e-9));
    CHECK_THROWS_AS(rates::fbl_rate(1.0, 168, 0.0), std::domain_error);
    CHECK_THROWS_AS(rates::fbl_rate(1.0, 168, 1.0), std::domain_error);
}

TEST_CASE("finite blocklength rate never exceeds Shannon and clamps at zero") {
    channel::GaussianStream g(6, 0, channel::StreamKind::Embb, 3);
    for (int i = 0; i < 200; ++i) {
        const double s = g.next_uniform() * 20.0;
        const double r = rates::fbl_rate(s, 168, 1e-5);
        CHECK(r >= 0.0);
        CHECK(r <= rates::shannon_rate(s) + 1e-12);
    }
}

TEST_CASE("sinr_for_fbl_rate inverts fbl_rate on the rising branch") {
    for (double req : {0.5, 2.0, 5.714285714285714, 8.0}) {
        const double s = rates::sinr_for_fbl_rate(req, 168, 1e-5);
        CHECK(rates::fbl_rate(s, 168, 1e-5) == doctest::Approx(req).epsilon(1e-9));
        CHECK(rates::fbl_rate(s * 0.999, 168, 1e-5) < req);
    }
    CHECK(rates::sinr_for_fbl_rate(0.0, 168, 1e-5) == 0.0);
}

TEST_CASE("latency check") {
    rates::QosSpec qos;
    qos.packet_bits = 4000.0;
    qos.bandwidth_hz = 1e6;
    qos.d_max_s = 0.7e-3;
    CHECK(rates::latency_ok(qos, 6.0));   // 0.667 ms
    CHECK(!rates::latency_ok(qos, 5.0));  // 0.8 ms
    CHECK(!rates::latency_ok(qos, 0.0));
}

TEST_CASE("jain index") {
    CHECK(rates::jain_index(std::vector<double>{1, 1, 1}) == doctest::Approx(1.0));
    CHECK(rates::jain_index(std::vector<double>{1, 0, 0}) == doctest::Approx(1.0 / 3.0));
    CHECK(rates::jain_index(std::vector<double>{2, 1}) == doctest::Approx(0.9));
    CHECK_THROWS_AS(rates::jain_index(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(rates::jain_index(std::vector<double>{0, 0}), std::domain_error);
}

TEST_CASE("qos validation") {
    rates::QosSpec qos;
    CHECK_NOTHROW(qos.validate());
    qos.reliability_eps = 0.5;
    CHECK_THROWS_AS(qos.validate(), std::invalid_argument);
}

TEST_CASE("sum rate with a fixed power budget ignores labels among equal gains") {
    std::vector<rates::Member> members{
        {0, rates::UserKind::Embb, 2.0, 0.01, 0.0},
        {1, rates::UserKind::Embb, 2.0, 0.01, 0.0},
    };
    const auto state = rates::make_ordered(0, members, 100.0);
    const std::vector<double> pa{0.3, 0.2};
    const std::vector<double> pb{0.2, 0.3};
    auto total = [&](const std::vector<double>& p) {
        return rates::shannon_rate(rates::effective_sinr(state, p, 0)) +
               rates::shannon_rate(rates::effective_sinr(state, p, 1));
    };
    CHECK(total(pa) == doctest::Approx(total(pb)).epsilon(1e-12));
}
