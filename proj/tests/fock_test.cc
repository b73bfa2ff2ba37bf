// Copyright 2026 The mzi-twophoton Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mzi/fock.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "mzi/circuit.hpp"
#include "mzi/verify/fock_oracle.hpp"

using namespace mzi;

namespace {

const Complex I{0.0, 1.0};

ComplexMatrix balanced_coupler() { return coupler_unitary(Coupler{0, 1, 0.5}, 2); }

ComplexMatrix random_complex(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = Complex{g(rng), g(rng)};
    }
    return m;
}

}  // namespace

TEST(FockState, rejects_negative_occupation) { EXPECT_THROW(FockState({1, -1}), ValidationError); }

TEST(FockState, total_and_equality) {
    const FockState a{2, 0, 1};
    EXPECT_EQ(a.total_photons(), 3);
    EXPECT_EQ(a.mode_count(), 3);
    EXPECT_EQ(a, (FockState{2, 0, 1}));
    EXPECT_NE(a, (FockState{2, 0, 1, 0}));
    EXPECT_NE(a, (FockState{2, 1, 0}));
    EXPECT_EQ(a.to_string(), "|2,0,1>");
}

TEST(FockSector, size_is_stars_and_bars) {
    EXPECT_EQ(fock_sector(2, 2).size(), 3u);
    EXPECT_EQ(fock_sector(3, 3).size(), 10u);
    EXPECT_EQ(fock_sector(4, 2).size(), 10u);
    for (const auto& s : fock_sector(3, 3)) EXPECT_EQ(s.total_photons(), 3);
    EXPECT_EQ(fock_sector(2, 2).front(), (FockState{2, 0}));
}

TEST(Permanent, identity_is_one) { EXPECT_NEAR(std::abs(permanent(ComplexMatrix::Identity(2, 2)) - 1.0), 0.0, 1e-15); }

TEST(Permanent, two_by_two_definition) {
    ComplexMatrix m(2, 2);
    m << 1, 2, 3, 4;
    EXPECT_EQ(permanent(m), Complex(10.0, 0.0));
}

TEST(Permanent, balanced_coupler_cancels) {
    // (1*1 + i*i)/2 = 0
    EXPECT_LT(std::abs(permanent(balanced_coupler())), 1e-16);
}

TEST(Permanent, all_ones_is_factorial) {
    for (int n = 0; n <= 8; ++n) {
        EXPECT_NEAR(permanent(ComplexMatrix::Ones(n, n)).real(), std::tgamma(n + 1.0), 1e-9) << n;
    }
}

TEST(Permanent, ryser_matches_naive_up_to_six) {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const ComplexMatrix m = random_complex(n, rng);
            const Complex naive = detail::permanent_naive(m);
            EXPECT_LT(std::abs(detail::permanent_ryser(m) - naive), 1e-12 * std::max(1.0, std::abs(naive))) << n;
            EXPECT_LT(std::abs(permanent(m) - naive), 1e-12 * std::max(1.0, std::abs(naive))) << n;
        }
    }
}

TEST(Permanent, errors) {
    EXPECT_THROW(permanent(ComplexMatrix::Zero(2, 3)), DimensionError);
    EXPECT_THROW(permanent(ComplexMatrix::Identity(13, 13)), SizeLimitError);
    EXPECT_NO_THROW(permanent(ComplexMatrix::Identity(12, 12)));
}

TEST(TransitionAmplitude, hom_effect) {
    EXPECT_LT(std::abs(transition_amplitude(balanced_coupler(), {1, 1}, {1, 1})), 1e-16);
}

TEST(TransitionAmplitude, identity_preserves_state) {
    const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
    for (const auto& s : fock_sector(3, 3)) {
        EXPECT_NEAR(std::abs(transition_amplitude(id, s, s) - Complex(1.0, 0.0)), 0.0, 1e-15) << s;
    }
}

TEST(TransitionAmplitude, bunched_output_weight) {
    const Complex a = transition_amplitude(balanced_coupler(), {1, 1}, {2, 0});
    EXPECT_NEAR(std::abs(a), 1.0 / std::sqrt(2.0), 1e-15);
    // matches the creation-operator expansion, phase included
    EXPECT_LT(std::abs(a - verify::oracle_amplitude(balanced_coupler(), {1, 1}, {2, 0})), 1e-15);
}

TEST(TransitionAmplitude, errors) {
    EXPECT_THROW(transition_amplitude(balanced_coupler(), {1, 1}, {1, 0}), ConservationError);
    EXPECT_THROW(transition_amplitude(balanced_coupler(), {1, 1, 0}, {1, 1, 0}), DimensionError);
    ComplexMatrix bad = balanced_coupler();
    bad(0, 0) *= 1.001;
    EXPECT_THROW(transition_amplitude(bad, {1, 1}, {1, 1}), ValidationError);
    EXPECT_THROW(transition_amplitude(ComplexMatrix::Identity(1, 1), FockState{13}, FockState{13}), SizeLimitError);
}

TEST(OutputDistribution, balanced_coupler_bunches) {
    const auto d = output_distribution(balanced_coupler(), {1, 1});
    ASSERT_EQ(d.size(), 3u);
    EXPECT_NEAR(d.at({2, 0}), 0.5, 1e-15);
    EXPECT_NEAR(d.at({0, 2}), 0.5, 1e-15);
    EXPECT_NEAR(d.at({1, 1}), 0.0, 1e-15);
}

TEST(OutputDistribution, identity) {
    const auto d = output_distribution(ComplexMatrix::Identity(2, 2), {1, 1});
    EXPECT_NEAR(d.at({1, 1}), 1.0, 1e-15);
    EXPECT_NEAR(d.at({2, 0}), 0.0, 1e-15);
}

TEST(OutputDistribution, single_photon_splits_classically) {
    const auto d = output_distribution(coupler_unitary(Coupler{0, 1, 0.8}, 2), {1, 0});
    EXPECT_NEAR(d.at({1, 0}), 0.8, 1e-15);
    EXPECT_NEAR(d.at({0, 1}), 0.2, 1e-15);
    const auto o = verify::oracle_amplitude(coupler_unitary(Coupler{0, 1, 0.8}, 2), {1, 0}, {0, 1});
    EXPECT_NEAR(std::norm(o), 0.2, 1e-15);
}

TEST(OutputDistribution, normalized_and_conserving_for_random_unitaries) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 3;
        const ComplexMatrix u = verify::random_unitary(m, rng);
        const int n = 1 + (trial / 3) % 3;
        for (const auto& in : fock_sector(m, n)) {
            double total = 0.0;
            for (const auto& [out, p] : output_distribution(u, in)) {
                EXPECT_EQ(out.total_photons(), n);
                EXPECT_GE(p, 0.0);
                total += p;
            }
            EXPECT_NEAR(total, 1.0, 1e-10);
        }
    }
}

TEST(TransitionAmplitude, matches_creation_operator_expansion) {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 3;
        const ComplexMatrix u = verify::random_unitary(m, rng);
        for (int n = 1; n <= 3; ++n) {
            for (const auto& in : fock_sector(m, n)) {
                for (const auto& out : fock_sector(m, n)) {
                    const Complex a = transition_amplitude(u, in, out);
                    worst = std::max(worst, std::abs(a - verify::oracle_amplitude(u, in, out)));
                    EXPECT_LE(std::abs(a), 1.0 + 1e-12);
                }
            }
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Oracle, induced_sector_matrix_is_unitary) {
    std::mt19937_64 rng(9);
    const ComplexMatrix u = verify::random_unitary(3, rng);
    EXPECT_LT(unitarity_defect(verify::induced_sector_matrix(u, 3)), 1e-12);
}
