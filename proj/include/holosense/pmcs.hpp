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

#ifndef HOLOSENSE_PMCS_HPP
#define HOLOSENSE_PMCS_HPP

#include "holosense/channel.hpp"
#include "holosense/prony.hpp"
#include "holosense/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace holosense::pmcs
{

// Multi-user channel segmentation from a recovered object field: Prony
// estimation on the bottom row and the first column, amplitude-based pairing
// of the two estimate sets, and rank-one channel reconstruction per user.

inline constexpr double kNmseFloorDb = -300.0;

struct Config
{
    int n_users = 1;
    int est_order_h = 10;
    int est_order_v = 10;
    prony::Solver solver = prony::Solver::pseudoinverse;
    double root_tolerance = 0.1;
    double pairing_tolerance = 1.0;

    // est_order clamped into [n_users, K - n_users] along each axis.
    static Config for_geometry(const UpaGeometry &geom, int n_users, int est_order = 10);

    // N <= est_order_h <= n_h - N and N <= est_order_v <= n_v - N.
    void validate(const UpaGeometry &geom) const;
};

struct UserEstimate
{
    Complex z_h;  // horizontal root, projected onto the unit circle
    Complex z_v;  // vertical root, projected onto the unit circle
    Complex b;    // mean of the paired row and column amplitudes
    Complex b_h;
    Complex b_v;
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    // Largest | |z| - 1 | of the raw roots; accepted when within root_tolerance.
    double modulus_deviation = 0.0;
    bool accepted = true;
    CVector channel; // length N_t, unit order
};

struct Result
{
    std::vector<UserEstimate> users;
    std::optional<double> nmse_db;
    // Truth index matched to each estimated user when scored.
    std::vector<std::size_t> truth_assignment;
};

struct RowColSamples
{
    CVector row;    // y_h(k) = field(0, k), length n_h
    CVector column; // y_v(k) = field(k, 0), length n_v
};

RowColSamples extract_row_col_samples(const CMatrix &field);

// Permutation p minimising sum_i |b_h[i] - b_v[p[i]]|: exhaustive for N <= 8,
// greedy nearest pair otherwise. Throws PairingError when two assignments
// tie within 1e-9 or the largest matched distance exceeds
// tolerance * median(|b|).
std::vector<std::size_t> pair_estimates(const CVector &b_h, const CVector &b_v, double tolerance);

// Entry (m, n) = b z_v^m z_h^n in unit order. Throws DomainError when a root is
// farther than root_tolerance from the unit circle.
CVector reconstruct_channel(Complex z_h, Complex z_v, Complex b, const UpaGeometry &geom,
                            double root_tolerance = 0.1);

// Arrival angles from unit-circle roots. Throws DomainError for spacing above
// half a wavelength (aliasing is not resolved).
void angles_from_roots(Complex z_h, Complex z_v, const UpaGeometry &geom, double &theta_deg, double &phi_deg);

// || est - truth ||^2 / || truth ||^2; throws DomainError for a zero truth or a
// length mismatch.
double nmse_ratio(const CVector &estimate, const CVector &truth);
// 10 log10 of a ratio, floored at kNmseFloorDb.
double ratio_to_db(double ratio);
double nmse_db(const CVector &estimate, const CVector &truth);

Result segment(const CMatrix &field, const Config &config, const UpaGeometry &geom);

// Matches estimated users to true per-user channels by minimum total error,
// fills result.nmse_db and result.truth_assignment, and returns the pooled
// ratio sum ||h_hat - h||^2 / sum ||h||^2.
double score(Result &result, std::span<const CVector> truth);

} // namespace holosense::pmcs

#endif
