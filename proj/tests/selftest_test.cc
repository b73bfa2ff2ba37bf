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

#include "mzi/selftest.hpp"

#include <chrono>

#include "gtest/gtest.h"

using namespace mzi;

TEST(Selftest, all_suites_pass_quickly) {
    const auto start = std::chrono::steady_clock::now();
    const SelftestReport report = run_selftest();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ASSERT_EQ(report.suites.size(), 6u);
    for (const auto& s : report.suites) {
        EXPECT_TRUE(s.passed) << s.name << " deviation " << s.max_deviation;
        EXPECT_GT(s.cases, 0) << s.name;
    }
    EXPECT_TRUE(report.all_passed());
    EXPECT_LT(seconds, 60.0);
}

TEST(Selftest, perturbed_coupler_is_caught) {
    SelftestHooks hooks;
    hooks.balanced_eta = 0.5 + 1e-3;
    hooks.hom_cancellation_eta = 0.5 + 1e-3;
    const SelftestReport report = run_selftest(hooks);
    EXPECT_FALSE(report.all_passed());
    for (const auto& s : report.suites) {
        const bool targeted = s.name == "visibility_laws" || s.name == "hom_cancellation";
        EXPECT_EQ(s.passed, !targeted) << s.name << " deviation " << s.max_deviation;
    }
}
