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

#include "holosense/patterns.hpp"
#include "holosense/csv.hpp"
#include "holosense/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace holosense
{

namespace
{
constexpr double kPeakFloorDb = -40.0;
constexpr double kPatternFloorDb = -300.0;

std::vector<double> axis(double lo, double hi, double step, bool skip_first)
{
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> v;
    v.reserve(count);
    for (int i = skip_first ? 1 : 0; i < count; ++i)
        v.push_back(lo + i * step);
    return v;
}
} // namespace

AngularGrid AngularGrid::front_hemisphere(double step)
{
    return {0.0, 180.0, -90.0, 90.0, step};
}

void AngularGrid::validate() const
{
    if (!(step > 0.0))
        throw DomainError("grid step must be positive");
    if (!(theta_lo >= 0.0 && theta_hi <= 180.0 && theta_lo < theta_hi))
        throw DomainError("elevation range must lie within [0, 180] degrees");
    if (!(phi_lo >= -180.0 && phi_hi <= 180.0 && phi_lo < phi_hi))
        throw DomainError("azimuth range must lie within [-180, 180] degrees");
    if (thetas().size() < 2 || phis().size() < 2)
        throw DomainError("grid step leaves fewer than two points along an axis");
}

bool AngularGrid::phi_wraps() const
{
    return phi_hi - phi_lo >= 360.0 - 1e-9;
}

std::vector<double> AngularGrid::thetas() const
{
    return axis(theta_lo, theta_hi, step, false);
}

std::vector<double> AngularGrid::phis() const
{
    return axis(phi_lo, phi_hi, step, phi_wraps());
}

RMatrix beam_power(const CVector &weights, const UpaGeometry &geom, const AngularGrid &grid)
{
    grid.validate();
    if (static_cast<std::size_t>(weights.size()) != geom.unit_count())
        throw DomainError("weight vector length does not match the array size");

    const std::vector<double> th = grid.thetas();
    const std::vector<double> ph = grid.phis();
    const CMatrix w = to_grid(geom, weights);

    RMatrix power(th.size(), ph.size());
    for (std::size_t i = 0; i < th.size(); ++i)
    {
        const double theta = deg2rad(th[i]);
        // a^H w = sum_n conj(a_h[n]) * sum_m conj(a_v[m]) w(m, n)
        const CVector col_sum = w.transpose() * steering_vertical(geom, theta).conjugate();
        for (std::size_t j = 0; j < ph.size(); ++j)
        {
            const CVector ah = steering_horizontal(geom, theta, deg2rad(ph[j]));
            power(i, j) = std::norm(ah.dot(col_sum)); // dot conjugates its left operand
        }
    }
    return power;
}

std::vector<Peak> local_maxima(const RMatrix &values, const AngularGrid &grid, double floor)
{
    const std::vector<double> th = grid.thetas();
    const std::vector<double> ph = grid.phis();
    const auto rows = static_cast<Eigen::Index>(th.size());
    const auto cols = static_cast<Eigen::Index>(ph.size());
    const bool wrap = grid.phi_wraps();

    std::vector<Peak> peaks;
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        // At theta = 0 or 180 every azimuth is the same direction; compare the
        // pole against the whole adjacent ring and report it once.
        const bool pole = th[i] <= 1e-9 || th[i] >= 180.0 - 1e-9;
        if (pole)
        {
            const double v = values.row(i).maxCoeff();
            const Eigen::Index ring = i == 0 ? 1 : i - 1;
            if (v >= floor && rows > 1 && v > values.row(ring).maxCoeff())
            {
                const auto zero = std::find_if(ph.begin(), ph.end(), [](double p) { return std::abs(p) < 1e-9; });
                peaks.push_back({th[i], zero != ph.end() ? 0.0 : ph.front(), v});
            }
            continue;
        }
        for (Eigen::Index j = 0; j < cols; ++j)
        {
            const double v = values(i, j);
            if (v < floor)
                continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1 && is_max; ++dj)
                {
                    if (di == 0 && dj == 0)
                        continue;
                    const Eigen::Index ni = i + di;
                    Eigen::Index nj = j + dj;
                    if (ni < 0 || ni >= rows)
                        continue;
                    if (nj < 0 || nj >= cols)
                    {
                        if (!wrap)
                            continue;
                        nj = (nj + cols) % cols;
                    }
                    if (!(v > values(ni, nj)))
                        is_max = false;
                }
            if (is_max)
                peaks.push_back({th[i], ph[j], v});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) { return a.value > b.value; });
    return peaks;
}

PatternResult array_pattern(const CVector &weights, const UpaGeometry &geom, const AngularGrid &grid)
{
    if (weights.size() == 0 || weights.cwiseAbs().maxCoeff() == 0.0)
        throw DomainError("weights are identically zero");
    const RMatrix power = beam_power(weights, geom, grid);
    const double peak = power.maxCoeff();
    if (!(peak > 0.0))
        throw DomainError("weights radiate no power over the grid");

    PatternResult out;
    out.grid = grid;
    out.gain_db = power.unaryExpr([peak](double p) {
        return p > 0.0 ? std::max(kPatternFloorDb, 10.0 * std::log10(p / peak)) : kPatternFloorDb;
    });
    out.peaks = local_maxima(out.gain_db, grid, kPeakFloorDb);
    return out;
}

void write_pattern_csv(std::ostream &out, const PatternResult &pattern)
{
    const std::vector<double> th = pattern.grid.thetas();
    const std::vector<double> ph = pattern.grid.phis();
    out << "theta_deg,phi_deg,gain_db\n";
    for (std::size_t i = 0; i < th.size(); ++i)
        for (std::size_t j = 0; j < ph.size(); ++j)
            csv::write_row(out, {th[i], ph[j], pattern.gain_db(i, j)});
}

} // namespace holosense
