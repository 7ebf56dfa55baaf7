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

#ifndef HOLOSENSE_CHANNEL_HPP
#define HOLOSENSE_CHANNEL_HPP

#include "holosense/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace holosense
{

// Uniform planar array on the y-z plane (x is the surface normal). Unit (m, n)
// sits at y = n * d_h, z = m * d_v; m is the vertical (row) index, n the
// horizontal (column) index. Units are numbered from the lower-left corner up
// the first column, then column by column: index = n * n_v + m.
struct UpaGeometry
{
    int n_v = 16;        // rows
    int n_h = 16;        // columns
    double d_v = 0.0;    // vertical spacing [m]
    double d_h = 0.0;    // horizontal spacing [m]
    double f_c = 3.5e9;  // carrier frequency [Hz]

    // Spacings given in carrier wavelengths
    static UpaGeometry make(int n_v, int n_h, double spacing_v_wl = 0.5, double spacing_h_wl = 0.5,
                            double f_c = 3.5e9);

    double lambda0() const { return kSpeedOfLight / f_c; }
    std::size_t unit_count() const { return static_cast<std::size_t>(n_v) * static_cast<std::size_t>(n_h); }
    std::size_t unit_index(int m, int n) const { return static_cast<std::size_t>(n) * n_v + m; }
    Eigen::Vector3d unit_position(int m, int n) const { return {0.0, n * d_h, m * d_v}; }

    // Throws DomainError when a field is out of range.
    void validate() const;

    bool operator==(const UpaGeometry &) const = default;
};

struct PathParams
{
    double theta_zod = kPi / 2; // [0, pi]
    double phi_aod = 0.0;       // (-pi, pi]
    double theta_zoa = kPi / 2; // [0, pi]
    double phi_aoa = 0.0;       // (-pi, pi]
    Complex beta{1.0, 0.0};     // complex path gain
    double tau = 0.0;           // delay [s]
};

struct UserScenario
{
    std::vector<PathParams> paths;
    Eigen::Vector3d rx_location = Eigen::Vector3d::Zero(); // [m]
    double speed = 0.0;                                    // [m/s]
    double theta_v = 0.0;                                  // travel elevation [rad]
    double phi_v = 0.0;                                    // travel azimuth [rad]
    Complex tx_symbol{1.0, 0.0};
};

struct SubcarrierGrid
{
    int n_f = 1;
    double delta_f = 0.0; // [Hz]
    double f_first = 3.5e9;

    double frequency(int i) const { return f_first + i * delta_f; }
    RVector frequencies() const;
};

// Line-of-sight user reduced to what the surface observes: arrival angles and
// the composite coefficient b (symbol, gain, location phase, delay, Doppler).
struct LosUser
{
    double theta = kPi / 2; // [rad]
    double phi = 0.0;       // [rad]
    Complex b{1.0, 0.0};
};

// Vertical factor a_v(theta), length n_v.
CVector steering_vertical(const UpaGeometry &geom, double theta);
// Horizontal factor a_h(theta, phi), length n_h.
CVector steering_horizontal(const UpaGeometry &geom, double theta, double phi);

// a_h(theta, phi) kron a_v(theta), length N_t. Throws DomainError for angles
// outside theta in [0, pi], phi in (-pi, pi].
CVector steering_vector(const UpaGeometry &geom, double theta, double phi);

// Unit vector toward the receiver for a path; the third component uses the
// departure elevation, as in the underlying model.
Eigen::Vector3d arrival_direction(const PathParams &path);
Eigen::Vector3d velocity_vector(const UserScenario &user);
double doppler(const UpaGeometry &geom, const UserScenario &user, const PathParams &path);

// Diagonal entry c_{u,p}(t) of the path-coefficient matrix.
Complex path_coefficient(const UpaGeometry &geom, const UserScenario &user, const PathParams &path, double t);

// H_u(t) = A C_u(t) B, shape N_t x N_f.
CMatrix channel_matrix(const UpaGeometry &geom, const UserScenario &user, const SubcarrierGrid &grid, double t);

// b_u for the first (line-of-sight) path at frequency f.
Complex composite_coefficient(const UpaGeometry &geom, const UserScenario &user, double f, double t);
LosUser to_los_user(const UpaGeometry &geom, const UserScenario &user, double t);

// Field over the surface produced by line-of-sight users, as a flat vector of
// length N_t in unit order. Throws DomainError for an empty user list.
CVector received_field(const UpaGeometry &geom, std::span<const LosUser> users);
CVector received_field(const UpaGeometry &geom, std::span<const UserScenario> users, double t);

// Per-user contribution b_u a(theta_u, phi_u).
CVector user_channel(const UpaGeometry &geom, const LosUser &user);

// Reshape between flat unit-ordered vectors and n_v x n_h grids.
CMatrix to_grid(const UpaGeometry &geom, const CVector &flat);
CVector to_flat(const CMatrix &grid);

} // namespace holosense

#endif
