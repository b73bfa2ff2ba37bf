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

#ifndef MZI_FOCK_HPP
#define MZI_FOCK_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mzi/errors.hpp"

namespace mzi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Largest matrix size accepted by permanent().
inline constexpr int kMaxPermanentSize = 12;

/// Tolerance used when checking that a mode transformation is unitary.
inline constexpr double kUnitarityTolerance = 1e-10;

/// Occupation-number state |n_0, n_1, ..., n_{m-1}>.
class FockState {
public:
    FockState() = default;

    explicit FockState(std::vector<int> occupations) : occupations_(std::move(occupations)) {
        for (int n : occupations_) {
            if (n < 0) {
                throw ValidationError("FockState occupations must be non-negative");
            }
        }
    }

    FockState(std::initializer_list<int> occupations)
        : FockState(std::vector<int>(occupations)) {}

    int mode_count() const noexcept { return static_cast<int>(occupations_.size()); }
    int total_photons() const noexcept {
        return std::accumulate(occupations_.begin(), occupations_.end(), 0);
    }
    int operator[](int mode) const { return occupations_.at(static_cast<std::size_t>(mode)); }
    const std::vector<int>& occupations() const noexcept { return occupations_; }

    std::string to_string() const {
        std::string s = "|";
        for (std::size_t i = 0; i < occupations_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(occupations_[i]);
        }
        return s + ">";
    }

    friend bool operator==(const FockState&, const FockState&) = default;
    friend auto operator<=>(const FockState&, const FockState&) = default;

private:
    std::vector<int> occupations_;
};

inline std::ostream& operator<<(std::ostream& os, const FockState& s) { return os << s.to_string(); }

/// n! as a double for n <= 12.
inline double factorial(int n) {
    static constexpr std::array<double, kMaxPermanentSize + 1> table = [] {
        std::array<double, kMaxPermanentSize + 1> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n < 0 || n > kMaxPermanentSize) {
        throw SizeLimitError("factorial table covers 0..12, got " + std::to_string(n));
    }
    return table[static_cast<std::size_t>(n)];
}

/// Maximum absolute entry of U^dagger U - I.
inline double unitarity_defect(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    const ComplexMatrix d = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
    return d.size() == 0 ? 0.0 : d.cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kUnitarityTolerance) {
    return u.rows() == u.cols() && u.allFinite() && unitarity_defect(u) < tol;
}

namespace detail {

inline void require_square(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("permanent requires a square matrix, got " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()));
    }
    if (m.rows() > kMaxPermanentSize) {
        throw SizeLimitError("permanent limited to n <= 12, got n = " + std::to_string(m.rows()));
    }
}

/// Sum over all n! permutations.
inline Complex permanent_naive(const ComplexMatrix& m) {
    require_square(m);
    const int n = static_cast<int>(m.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Complex total = 0.0;
    do {
        Complex term = 1.0;
        for (int i = 0; i < n; ++i) term *= m(i, perm[static_cast<std::size_t>(i)]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

/// Ryser's inclusion-exclusion formula, subsets visited in Gray-code order so
/// each step adds or removes a single column from the running row sums.
inline Complex permanent_ryser(const ComplexMatrix& m) {
    require_square(m);
    const int n = static_cast<int>(m.rows());
    if (n == 0) return 1.0;
    std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex{0.0, 0.0});
    Complex total = 0.0;
    std::uint32_t gray = 0;
    const std::uint32_t subsets = std::uint32_t{1} << n;
    for (std::uint32_t k = 1; k < subsets; ++k) {
        const int col = std::countr_zero(k);
        const std::uint32_t bit = std::uint32_t{1} << col;
        gray ^= bit;
        const double sign = (gray & bit) ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += sign * m(i, col);
        Complex prod = 1.0;
        for (const Complex& s : row_sums) prod *= s;
        total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
    }
    return (n % 2 == 0) ? total : -total;
}

}  // namespace detail

/// Matrix permanent. Naive expansion up to 4x4, Ryser/Gray code above.
inline Complex permanent(const ComplexMatrix& m) {
    detail::require_square(m);
    if (m.rows() <= 4) return detail::permanent_naive(m);
    return detail::permanent_ryser(m);
}

/// All Fock states with `photons` photons over `modes` modes, in descending
/// lexicographic order: (n,0,..), (n-1,1,..), ...
inline std::vector<FockState> fock_sector(int modes, int photons) {
    if (modes < 1 || photons < 0) {
        throw ValidationError("fock_sector needs modes >= 1 and photons >= 0");
    }
    std::vector<FockState> out;
    std::vector<int> occ(static_cast<std::size_t>(modes), 0);
    auto recurse = [&](auto&& self, int mode, int remaining) -> void {
        if (mode == modes - 1) {
            occ[static_cast<std::size_t>(mode)] = remaining;
            out.emplace_back(occ);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            occ[static_cast<std::size_t>(mode)] = k;
            self(self, mode + 1, remaining - k);
        }
    };
    recurse(recurse, 0, photons);
    return out;
}

namespace detail {

inline void check_transition_args(const ComplexMatrix& u, const FockState& in, const FockState& out) {
    if (u.rows() != u.cols()) {
        throw DimensionError("mode transformation must be square");
    }
    if (in.mode_count() != u.rows() || out.mode_count() != u.rows()) {
        throw DimensionError("Fock states must have " + std::to_string(u.rows()) + " modes");
    }
    if (in.total_photons() != out.total_photons()) {
        throw ConservationError("photon number mismatch: " + in.to_string() + " -> " + out.to_string());
    }
    if (!is_unitary(u)) {
        throw ValidationError("mode transformation is not unitary within 1e-10");
    }
}

/// Amplitude without argument validation; callers have already checked u.
inline Complex transition_amplitude_unchecked(const ComplexMatrix& u, const FockState& in,
                                              const FockState& out) {
    const int n = in.total_photons();
    if (n > kMaxPermanentSize) {
        throw SizeLimitError("at most 12 photons supported, got " + std::to_string(n));
    }
    std::vector<int> rows;
    std::vector<int> cols;
    rows.reserve(static_cast<std::size_t>(n));
    cols.reserve(static_cast<std::size_t>(n));
    double norm = 1.0;
    for (int k = 0; k < in.mode_count(); ++k) {
        for (int r = 0; r < out[k]; ++r) rows.push_back(k);
        for (int c = 0; c < in[k]; ++c) cols.push_back(k);
        norm *= factorial(in[k]) * factorial(out[k]);
    }
    ComplexMatrix sub(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            sub(r, c) = u(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
        }
    }
    return permanent(sub) / std::sqrt(norm);
}

}  // namespace detail

/// <out| U |in> for the bosonic evolution a_j^dagger -> sum_i U(i,j) a_i^dagger.
inline Complex transition_amplitude(const ComplexMatrix& u, const FockState& in, const FockState& out) {
    detail::check_transition_args(u, in, out);
    return detail::transition_amplitude_unchecked(u, in, out);
}

/// Outcome probabilities over the whole photon-number sector of `in`.
inline std::map<FockState, double> output_distribution(const ComplexMatrix& u, const FockState& in) {
    detail::check_transition_args(u, in, in);
    std::map<FockState, double> dist;
    for (const FockState& out : fock_sector(in.mode_count(), in.total_photons())) {
        dist.emplace(out, std::norm(detail::transition_amplitude_unchecked(u, in, out)));
    }
    return dist;
}

}  // namespace mzi

#endif  // MZI_FOCK_HPP
