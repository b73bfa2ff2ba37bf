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

// Reference evolution used only for verification. It expands the product of
// transformed creation operators term by term and never calls permanent().

#ifndef MZI_VERIFY_FOCK_ORACLE_HPP
#define MZI_VERIFY_FOCK_ORACLE_HPP

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mzi/fock.hpp"

namespace mzi::verify {

/// Polynomial in creation operators: exponent vector -> coefficient.
using CreationPolynomial = std::map<std::vector<int>, Complex>;

/// U|in> written as a polynomial in output creation operators acting on vacuum,
/// using a_j^dagger -> sum_i U(i,j) a_i^dagger.
inline CreationPolynomial evolve_creation_polynomial(const ComplexMatrix& u, const FockState& in) {
    const int m = static_cast<int>(u.rows());
    double norm = 1.0;
    for (int j = 0; j < m; ++j) norm *= std::tgamma(in[j] + 1.0);
    CreationPolynomial poly{{std::vector<int>(static_cast<std::size_t>(m), 0), Complex{1.0 / std::sqrt(norm), 0.0}}};
    for (int j = 0; j < m; ++j) {
        for (int rep = 0; rep < in[j]; ++rep) {
            CreationPolynomial next;
            for (const auto& [exps, coeff] : poly) {
                for (int i = 0; i < m; ++i) {
                    if (u(i, j) == Complex{0.0, 0.0}) continue;
                    std::vector<int> e = exps;
                    ++e[static_cast<std::size_t>(i)];
                    next[e] += coeff * u(i, j);
                }
            }
            poly = std::move(next);
        }
    }
    return poly;
}

/// <out|U|in> by direct expansion; (a^dagger)^k |0> = sqrt(k!) |k>.
inline Complex oracle_amplitude(const ComplexMatrix& u, const FockState& in, const FockState& out) {
    const CreationPolynomial poly = evolve_creation_polynomial(u, in);
    const auto it = poly.find(out.occupations());
    if (it == poly.end()) return {0.0, 0.0};
    double norm = 1.0;
    for (int k : out.occupations()) norm *= std::tgamma(k + 1.0);
    return it->second * std::sqrt(norm);
}

/// Matrix of U restricted to the n-photon sector, rows/cols in fock_sector order.
inline ComplexMatrix induced_sector_matrix(const ComplexMatrix& u, int photons) {
    const auto basis = fock_sector(static_cast<int>(u.rows()), photons);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    ComplexMatrix big(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            big(r, c) = oracle_amplitude(u, basis[static_cast<std::size_t>(c)], basis[static_cast<std::size_t>(r)]);
        }
    }
    return big;
}

/// Probability that two distinguishable photons, launched from modes 0 and 1,
/// leave in different modes: each is routed independently with |U(i,j)|^2.
inline double distinguishable_coincidence(const ComplexMatrix& u) {
    double p = 0.0;
    for (int out_a = 0; out_a < 2; ++out_a) {
        for (int out_b = 0; out_b < 2; ++out_b) {
            if (out_a != out_b) p += std::norm(u(out_a, 0)) * std::norm(u(out_b, 1));
        }
    }
    return p;
}

/// Haar-random unitary via QR of a complex Gaussian matrix with the phase of
/// R's diagonal absorbed into Q.
template <class Rng>
ComplexMatrix random_unitary(int n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix z(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) z(i, j) = Complex{gauss(rng), gauss(rng)};
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

}  // namespace mzi::verify

#endif  // MZI_VERIFY_FOCK_ORACLE_HPP
