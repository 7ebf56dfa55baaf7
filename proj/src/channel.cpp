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

#include "holosense/channel.hpp"
#include "holosense/error.hpp"

#include <cmath>
#include <string>

namespace holosense
{

namespace
{
constexpr double kAngleSlack = 1e-12;

void check_angles(double theta, double phi)
{
    if (!(theta >= -kAngleSlack && theta <= kPi + kAngleSlack))
        throw DomainError("elevation angle " + std::to_string(theta) + " rad outside [0, pi]");
    if (!(phi > -kPi - kAngleSlack && phi <= kPi + kAngleSlack))
        throw DomainError("azimuth angle " + std::to_string(phi) + " rad outside (-pi, pi]");
}

// exp(j * 2 pi * k * spacing * direction / lambda0), k = 0 .. count-1
CVector phase_ramp(int count, double spacing, double direction, double lambda0)
{
    const double step = 2.0 * kPi * spacing * direction / lambda0;
    CVector out(count);
    for (int k = 0; k < count; ++k)
        out[k] = std::polar(1.0, step * k);
    return out;
}
} // namespace

UpaGeometry UpaGeometry::make(int n_v, int n_h, double spacing_v_wl, double spacing_h_wl, double f_c)
{
    UpaGeometry g;
    g.n_v = n_v;
    g.n_h = n_h;
    g.f_c = f_c;
    const double lambda0 = kSpeedOfLight / f_c;
    g.d_v = spacing_v_wl * lambda0;
    g.d_h = spacing_h_wl * lambda0;
    g.validate();
    return g;
}

void UpaGeometry::validate() const
{
    if (n_v < 1 || n_h < 1)
        throw DomainError("array dimensions must be at least 1x1");
    if (!(d_v > 0.0) || !(d_h > 0.0))
        throw DomainError("unit spacing must be positive");
    if (!(f_c > 0.0) || !std::isfinite(f_c))
        throw DomainError("carrier frequency must be positive and finite");
}

RVector SubcarrierGrid::frequencies() const
{
    RVector f(n_f);
    for (int i = 0; i < n_f; ++i)
        f[i] = frequency(i);
    return f;
}

CVector steering_vertical(const UpaGeometry &geom, double theta)
{
    return phase_ramp(geom.n_v, geom.d_v, std::cos(theta), geom.lambda0());
}

CVector steering_horizontal(const UpaGeometry &geom, double theta, double phi)
{
    return phase_ramp(geom.n_h, geom.d_h, std::sin(theta) * std::sin(phi), geom.lambda0());
}

CVector steering_vector(const UpaGeometry &geom, double theta, double phi)
{
    check_angles(theta, phi);
    const CVector av = steering_vertical(geom, theta);
    const CVector ah = steering_horizontal(geom, theta, phi);
    CVector a(geom.unit_count());
    for (int n = 0; n < geom.n_h; ++n)
        a.segment(static_cast<Eigen::Index>(n) * geom.n_v, geom.n_v) = ah[n] * av;
    return a;
}

Eigen::Vector3d arrival_direction(const PathParams &path)
{
    return {std::sin(path.theta_zoa) * std::cos(path.phi_aoa),
            std::sin(path.theta_zoa) * std::sin(path.phi_aoa),
            std::cos(path.theta_zod)};
}

Eigen::Vector3d velocity_vector(const UserScenario &user)
{
    return user.speed * Eigen::Vector3d(std::sin(user.theta_v) * std::cos(user.phi_v),
                                        std::sin(user.theta_v) * std::sin(user.phi_v),
                                        std::cos(user.theta_v));
}

double doppler(const UpaGeometry &geom, const UserScenario &user, const PathParams &path)
{
    return arrival_direction(path).dot(velocity_vector(user)) / geom.lambda0();
}

Complex path_coefficient(const UpaGeometry &geom, const UserScenario &user, const PathParams &path, double t)
{
    const double location_phase = 2.0 * kPi * arrival_direction(path).dot(user.rx_location) / geom.lambda0();
    return path.beta * std::polar(1.0, location_phase) * std::polar(1.0, doppler(geom, user, path) * t);
}

CMatrix channel_matrix(const UpaGeometry &geom, const UserScenario &user, const SubcarrierGrid &grid, double t)
{
    geom.validate();
    if (user.paths.empty())
        throw DomainError("channel_matrix needs at least one path");
    if (grid.n_f < 1)
        throw DomainError("subcarrier grid must hold at least one frequency");

    const auto paths = static_cast<Eigen::Index>(user.paths.size());
    CMatrix steering(geom.unit_count(), paths);
    CMatrix delays(paths, grid.n_f);
    CVector coeff(paths);
    for (Eigen::Index p = 0; p < paths; ++p)
    {
        const PathParams &path = user.paths[p];
        steering.col(p) = steering_vector(geom, path.theta_zod, path.phi_aod);
        for (int i = 0; i < grid.n_f; ++i)
            delays(p, i) = std::polar(1.0, -2.0 * kPi * grid.frequency(i) * path.tau);
        coeff[p] = path_coefficient(geom, user, path, t);
    }
    return steering * coeff.asDiagonal() * delays;
}

Complex composite_coefficient(const UpaGeometry &geom, const UserScenario &user, double f, double t)
{
    if (user.paths.empty())
        throw DomainError("user has no paths");
    const PathParams &los = user.paths.front();
    return user.tx_symbol * path_coefficient(geom, user, los, t) * std::polar(1.0, -2.0 * kPi * f * los.tau);
}

LosUser to_los_user(const UpaGeometry &geom, const UserScenario &user, double t)
{
    const Complex b = composite_coefficient(geom, user, geom.f_c, t);
    return {user.paths.front().theta_zod, user.paths.front().phi_aod, b};
}

CVector user_channel(const UpaGeometry &geom, const LosUser &user)
{
    return user.b * steering_vector(geom, user.theta, user.phi);
}

CVector received_field(const UpaGeometry &geom, std::span<const LosUser> users)
{
    if (users.empty())
        throw DomainError("received_field needs at least one user");
    CVector y = CVector::Zero(geom.unit_count());
    for (const LosUser &u : users)
        y += user_channel(geom, u);
    return y;
}

CVector received_field(const UpaGeometry &geom, std::span<const UserScenario> users, double t)
{
    std::vector<LosUser> los;
    los.reserve(users.size());
    for (const UserScenario &u : users)
        los.push_back(to_los_user(geom, u, t));
    return received_field(geom, los);
}

CMatrix to_grid(const UpaGeometry &geom, const CVector &flat)
{
    if (static_cast<std::size_t>(flat.size()) != geom.unit_count())
        throw DomainError("vector length does not match the array size");
    return Eigen::Map<const CMatrix>(flat.data(), geom.n_v, geom.n_h);
}

CVector to_flat(const CMatrix &grid)
{
    return Eigen::Map<const CVector>(grid.data(), grid.size());
}

} // namespace holosense
