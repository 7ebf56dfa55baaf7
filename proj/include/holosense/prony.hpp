// SPDX-License-Identifier: Apache-2.0
//
// holosense: channel sensing for holographic interference surfaces
// Copyright (C) 2026 The holosense authors
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

#ifndef HOLOSENSE_PRONY_HPP
#define HOLOSENSE_PRONY_HPP

#include "holosense/types.hpp"

#include <string_view>

namespace holosense::prony
{

// Extended Prony estimation of y(k) = sum_n b_n z_n^k, k = 0 .. K-1.
//
// A prediction polynomial H(z) = sum_{i=0}^{P_e} h_i z^{-i} (h_0 = 1) of order
// P_e >= N is fitted to the data by a minimum-norm solve of Y h = 0. Its
// zeros split into N signal zeros (on the unit circle for undamped data) and
// P_e - N extraneous zeros strictly inside it. The amplitudes follow from a
// Vandermonde least-squares fit on the selected zeros.

enum class Solver
{
    pseudoinverse,
    total_least_squares,
};

Solver parse_solver(std::string_view name);
std::string_view to_string(Solver solver);

struct Config
{
    int n_signals = 1;          // N
    int est_order = 1;          // P_e
    double root_tolerance = 0.1; // half-width of the band around |z| = 1
    Solver solver = Solver::pseudoinverse;

    // Requires N >= 1 and N <= P_e <= K - N. Throws DomainError.
    void validate(int sample_count) const;
};

struct Estimate
{
    CVector coeffs;       // h, length P_e + 1, coeffs[0] == 1
    CVector roots_all;    // all P_e zeros of H
    CVector roots_signal; // N selected zeros, largest modulus first
    CVector amplitudes;   // b, aligned with roots_signal
    double residual = 0.0; // || Phi b - y ||_2
};

// (K - P_e) x (P_e + 1) matrix with entry (r, c) = y(P_e + r - c).
// Throws DomainError if K < P_e + 1.
CMatrix build_data_matrix(const CVector &samples, int est_order);

// Minimum-norm h with h_0 = 1 and Y h ~ 0.
//
// pseudoinverse: Y = [y0 | Y1], h = [1; -pinv_r(Y1) y0] where pinv_r keeps the
// leading `rank` singular values of Y1.
// total_least_squares: h is the minimum-norm vector with h_0 = 1 in the span of
// the trailing right singular vectors of Y (noise subspace beyond `rank`).
//
// rank <= 0 selects the effective numerical rank. Throws DegenerateInputError
// for an all-zero Y.
CVector solve_min_norm(const CMatrix &data, int rank, Solver solver = Solver::pseudoinverse);

// Numerical rank: number of singular values above 1e-10 * sigma_1.
int effective_rank(const CMatrix &m);

// All P_e zeros of sum_i h_i z^{P_e - i} via companion-matrix eigenvalues.
// Throws DomainError unless coeffs[0] == 1.
CVector find_roots(const CVector &coeffs);

// N zeros of largest modulus. Zeros whose moduli tie at the selection
// boundary (within tie_tolerance) are resolved by the larger provisional
// amplitude fitted on `samples` when given. Throws DomainError if fewer than N
// zeros are supplied.
CVector select_signal_roots(const CVector &roots, int n_signals, double tie_tolerance = 1e-9,
                            const CVector *samples = nullptr);

// K x N Vandermonde matrix Phi(k, n) = z_n^k.
CMatrix vandermonde(const CVector &roots, int sample_count);

// Least-squares amplitudes b = argmin || Phi b - y ||_2. Throws
// IllConditionedError when two roots lie within 1e-9 of each other and
// DomainError when K < N.
CVector fit_amplitudes(const CVector &samples, const CVector &roots);

// Full estimator: data matrix, minimum-norm solve truncated at rank N, root
// extraction, selection and amplitude fit.
Estimate estimate(const CVector &samples, const Config &config);

} // namespace holosense::prony

#endif
