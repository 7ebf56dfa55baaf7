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

#ifndef HOLOSENSE_PATTERNS_HPP
#define HOLOSENSE_PATTERNS_HPP

#include "holosense/channel.hpp"
#include "holosense/types.hpp"

#include <iosfwd>
#include <vector>

namespace holosense
{

// Regular grid in degrees. When the azimuth range spans a full turn the lower
// end is dropped (it coincides with the upper end) and neighbours wrap.
struct AngularGrid
{
    double theta_lo = 0.0;
    double theta_hi = 180.0;
    double phi_lo = -180.0;
    double phi_hi = 180.0;
    double step = 1.0;

    // Half space in front of the surface, phi in [-90, 90].
    static AngularGrid front_hemisphere(double step = 1.0);

    void validate() const;
    bool phi_wraps() const;
    std::vector<double> thetas() const;
    std::vector<double> phis() const;
};

struct Peak
{
    double theta_deg;
    double phi_deg;
    double value; // gain in dB for patterns, linear power for beamscans
};

struct PatternResult
{
    AngularGrid grid;
    RMatrix gain_db; // thetas x phis, max == 0
    std::vector<Peak> peaks;
};

// |a(theta, phi)^H w|^2 over the grid (rows: theta, cols: phi). Evaluated per
// elevation through the Kronecker factorisation of the steering vector.
RMatrix beam_power(const CVector &weights, const UpaGeometry &geom, const AngularGrid &grid);

// Strict 8-neighbour local maxima with value >= floor, sorted by value.
std::vector<Peak> local_maxima(const RMatrix &values, const AngularGrid &grid, double floor);

// Normalised radiation pattern in dB with peaks above -40 dB. Throws
// DomainError for zero or wrongly sized weights.
PatternResult array_pattern(const CVector &weights, const UpaGeometry &geom, const AngularGrid &grid);

// Rows of theta_deg, phi_deg, gain_db in row-major grid order, with header.
void write_pattern_csv(std::ostream &out, const PatternResult &pattern);

} // namespace holosense

#endif
