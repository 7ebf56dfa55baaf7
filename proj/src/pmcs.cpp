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

#include "holosense/pmcs.hpp"
#include "holosense/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace holosense::pmcs
{

namespace
{
constexpr int kExhaustiveLimit = 8;
constexpr double kTieTolerance = 1e-9;

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Minimum-cost assignment over a square cost matrix. Exhaustive search keeps
// the runner-up cost for tie detection; larger problems fall back to greedy
// nearest pairs (runner_up stays +inf).
struct Assignment
{
    std::vector<std::size_t> best;
    std::vector<std::size_t> runner_up;
    double best_cost = std::numeric_limits<double>::infinity();
    double runner_up_cost = std::numeric_limits<double>::infinity();
};

Assignment assign(const RMatrix &cost)
{
    const auto n = static_cast<std::size_t>(cost.rows());
    Assignment out;
    if (n <= kExhaustiveLimit)
    {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do
        {
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                c += cost(i, perm[i]);
            if (c < out.best_cost)
            {
                out.runner_up = out.best;
                out.runner_up_cost = out.best_cost;
                out.best = perm;
                out.best_cost = c;
            }
            else if (c < out.runner_up_cost)
            {
                out.runner_up = perm;
                out.runner_up_cost = c;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out;
    }

    out.best.assign(n, 0);
    std::vector<bool> row_used(n, false), col_used(n, false);
    out.best_cost = 0.0;
    for (std::size_t step = 0; step < n; ++step)
    {
        double min_c = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n && !row_used[i]; ++j)
                if (!col_used[j] && cost(i, j) < min_c)
                {
                    min_c = cost(i, j);
                    bi = i;
                    bj = j;
                }
        row_used[bi] = col_used[bj] = true;
        out.best[bi] = bj;
        out.best_cost += min_c;
    }
    return out;
}

void check_spacing(double spacing, double lambda0, const char *axis)
{
    if (spacing > 0.5 * lambda0 * (1.0 + 1e-9))
        throw DomainError(std::string(axis) + " spacing exceeds half a wavelength; angle recovery would alias");
}
} // namespace

Config Config::for_geometry(const UpaGeometry &geom, int n_users, int est_order)
{
    Config cfg;
    cfg.n_users = n_users;
    cfg.est_order_h = std::clamp(est_order, n_users, std::max(n_users, geom.n_h - n_users));
    cfg.est_order_v = std::clamp(est_order, n_users, std::max(n_users, geom.n_v - n_users));
    return cfg;
}

void Config::validate(const UpaGeometry &geom) const
{
    if (n_users < 1)
        throw DomainError("number of users must be at least 1");
    prony::Config row{n_users, est_order_h, root_tolerance, solver};
    prony::Config col{n_users, est_order_v, root_tolerance, solver};
    row.validate(geom.n_h);
    col.validate(geom.n_v);
    if (!(pairing_tolerance > 0.0))
        throw DomainError("pairing tolerance must be positive");
}

RowColSamples extract_row_col_samples(const CMatrix &field)
{
    if (field.size() == 0)
        throw DomainError("empty field");
    return {field.row(0).transpose(), field.col(0)};
}

std::vector<std::size_t> pair_estimates(const CVector &b_h, const CVector &b_v, double tolerance)
{
    if (b_h.size() != b_v.size())
        throw DomainError("horizontal and vertical amplitude sets differ in size");
    const auto n = static_cast<std::size_t>(b_h.size());
    if (n == 0)
        return {};
    if (n == 1)
        return {0};

    RMatrix cost(n, n);
    std::vector<double> mags;
    for (std::size_t i = 0; i < n; ++i)
    {
        mags.push_back(std::abs(b_h[i]));
        mags.push_back(std::abs(b_v[i]));
        for (std::size_t j = 0; j < n; ++j)
            cost(i, j) = std::abs(b_h[i] - b_v[j]);
    }
    const double scale = median(mags);

    const Assignment a = assign(cost);
    if (a.runner_up_cost - a.best_cost <= kTieTolerance * std::max(1.0, scale))
        throw PairingError("amplitude pairing is ambiguous: two assignments have equal cost", {a.best, a.runner_up});

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, cost(i, a.best[i]));
    if (worst > tolerance * scale)
        throw PairingError("best amplitude pairing leaves a pair " + std::to_string(worst) + " apart (limit " +
                               std::to_string(tolerance * scale) + ")",
                           {a.best});
    return a.best;
}

CVector reconstruct_channel(Complex z_h, Complex z_v, Complex b, const UpaGeometry &geom, double root_tolerance)
{
    if (std::abs(std::abs(z_h) - 1.0) > root_tolerance || std::abs(std::abs(z_v) - 1.0) > root_tolerance)
        throw DomainError("reconstruction roots are off the unit circle");
    CVector vert(geom.n_v), horiz(geom.n_h);
    Complex p{1.0, 0.0};
    for (int m = 0; m < geom.n_v; ++m, p *= z_v)
        vert[m] = p;
    p = 1.0;
    for (int n = 0; n < geom.n_h; ++n, p *= z_h)
        horiz[n] = p;
    CVector h(geom.unit_count());
    for (int n = 0; n < geom.n_h; ++n)
        h.segment(static_cast<Eigen::Index>(n) * geom.n_v, geom.n_v) = (b * horiz[n]) * vert;
    return h;
}

void angles_from_roots(Complex z_h, Complex z_v, const UpaGeometry &geom, double &theta_deg, double &phi_deg)
{
    const double lambda0 = geom.lambda0();
    check_spacing(geom.d_v, lambda0, "vertical");
    check_spacing(geom.d_h, lambda0, "horizontal");
    const double cos_theta = std::clamp(lambda0 * std::arg(z_v) / (2.0 * kPi * geom.d_v), -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    const double u = lambda0 * std::arg(z_h) / (2.0 * kPi * geom.d_h);
    const double sin_theta = std::sin(theta);
    const double phi = sin_theta > 1e-12 ? std::asin(std::clamp(u / sin_theta, -1.0, 1.0)) : 0.0;
    theta_deg = rad2deg(theta);
    phi_deg = rad2deg(phi);
}

double nmse_ratio(const CVector &estimate, const CVector &truth)
{
    if (estimate.size() != truth.size())
        throw DomainError("estimate and truth differ in length");
    const double denom = truth.squaredNorm();
    if (!(denom > 0.0))
        throw DomainError("true channel has zero norm");
    return (estimate - truth).squaredNorm() / denom;
}

double ratio_to_db(double ratio)
{
    if (!(ratio > 0.0))
        return kNmseFloorDb;
    return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

double nmse_db(const CVector &estimate, const CVector &truth)
{
    return ratio_to_db(nmse_ratio(estimate, truth));
}

Result segment(const CMatrix &field, const Config &config, const UpaGeometry &geom)
{
    config.validate(geom);
    if (field.rows() != geom.n_v || field.cols() != geom.n_h)
        throw DomainError("field does not match the surface dimensions");

    const RowColSamples s = extract_row_col_samples(field);
    const int n = config.n_users;

    const prony::Estimate est_h =
        prony::estimate(s.row, {n, config.est_order_h, config.root_tolerance, config.solver});
    const prony::Estimate est_v =
        prony::estimate(s.column, {n, config.est_order_v, config.root_tolerance, config.solver});
    if (est_h.roots_signal.size() != n || est_v.roots_signal.size() != n)
        throw EstimationError("Prony estimation returned fewer roots than users");

    // Users are undamped plane waves: keep only the phase of each root and
    // refit the amplitudes on the projected roots.
    auto project = [](const CVector &z) -> CVector {
        CVector out(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i)
        {
            if (std::abs(z[i]) == 0.0)
                throw EstimationError("selected root is zero");
            out[i] = z[i] / std::abs(z[i]);
        }
        return out;
    };
    const CVector z_h = project(est_h.roots_signal);
    const CVector z_v = project(est_v.roots_signal);
    const CVector b_h = prony::fit_amplitudes(s.row, z_h);
    const CVector b_v = prony::fit_amplitudes(s.column, z_v);

    const std::vector<std::size_t> perm = pair_estimates(b_h, b_v, config.pairing_tolerance);

    Result result;
    result.users.reserve(n);
    for (int i = 0; i < n; ++i)
    {
        const auto j = static_cast<Eigen::Index>(perm[i]);
        UserEstimate u;
        u.z_h = z_h[i];
        u.z_v = z_v[j];
        u.b_h = b_h[i];
        u.b_v = b_v[j];
        u.b = 0.5 * (u.b_h + u.b_v);
        u.modulus_deviation = std::max(std::abs(std::abs(est_h.roots_signal[i]) - 1.0),
                                       std::abs(std::abs(est_v.roots_signal[j]) - 1.0));
        u.accepted = u.modulus_deviation <= config.root_tolerance;
        angles_from_roots(u.z_h, u.z_v, geom, u.theta_deg, u.phi_deg);
        u.channel = reconstruct_channel(u.z_h, u.z_v, u.b, geom);
        result.users.push_back(std::move(u));
    }
    return result;
}

double score(Result &result, std::span<const CVector> truth)
{
    const std::size_t n = truth.size();
    if (result.users.size() != n)
        throw DomainError("estimated and true user counts differ");
    if (n == 0)
        throw DomainError("no users to score");

    RMatrix err(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            if (result.users[i].channel.size() != truth[j].size())
                throw DomainError("estimate and truth differ in length");
            err(i, j) = (result.users[i].channel - truth[j]).squaredNorm();
        }
    const Assignment a = assign(err);

    double denom = 0.0;
    for (const CVector &h : truth)
        denom += h.squaredNorm();
    if (!(denom > 0.0))
        throw DomainError("true channels have zero norm");

    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        num += err(i, a.best[i]);
    const double ratio = num / denom;
    result.truth_assignment = a.best;
    result.nmse_db = ratio_to_db(ratio);
    return ratio;
}

} // namespace holosense::pmcs
