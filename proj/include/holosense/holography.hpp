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

#ifndef HOLOSENSE_HOLOGRAPHY_HPP
#define HOLOSENSE_HOLOGRAPHY_HPP

#include "holosense/channel.hpp"
#include "holosense/random.hpp"
#include "holosense/types.hpp"

#include <cstdint>
#include <iosfwd>

namespace holosense
{

// Locally generated reference wave E_r = A_r exp(j (k_r . r + phase_shift)).
// Exposures are instantaneous snapshots with omega_r equal to the users'
// carrier, so omega_r never enters the recorded intensity.
struct ReferenceWave
{
    double amplitude = 1.0;
    Eigen::Vector3d k_vec = Eigen::Vector3d::Zero(); // [rad/m]
    double phase_shift = 0.0;                        // [rad]
    double omega_r = 0.0;                            // [rad/s]

    // Plane wave travelling along the surface normal: identical phase at
    // every unit.
    static ReferenceWave normal_incidence(double amplitude = 1.0);

    ReferenceWave shifted(double extra_phase) const;
};

// E_r over the surface grid (n_v x n_h).
CMatrix reference_field(const UpaGeometry &geom, const ReferenceWave &ref);

struct Hologram
{
    RMatrix intensity; // n_v x n_h
    double phase_shift = 0.0;
    UpaGeometry geom;
};

// Three exposures at reference phase steps 0, pi/2, pi.
struct HologramSet
{
    Hologram i0;
    Hologram i_half;
    Hologram i_pi;
};

// Object-side detector noise: CN(0, sigma^2) added to the object field at
// every unit and exposure, before intensity detection.
struct NoiseModel
{
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Stateful draw stream for one NoiseModel; successive draws are independent
// exposures.
class NoiseSource
{
public:
    explicit NoiseSource(const NoiseModel &model);

    double sigma() const { return sigma_; }
    // Next n_v x n_h exposure of noise (all zero when sigma == 0).
    CMatrix draw(int rows, int cols);

private:
    double sigma_;
    Engine engine_;
};

// sigma such that mean |E_o|^2 / sigma^2 equals the requested SNR.
double noise_sigma_for_snr(const CMatrix &object_field, double snr_db);

// |E_o + w + E_r|^2 at every unit. Throws DomainError on a dimension mismatch.
Hologram record(const CMatrix &object_field, const UpaGeometry &geom, const ReferenceWave &ref, NoiseSource &noise);
Hologram record(const CMatrix &object_field, const UpaGeometry &geom, const ReferenceWave &ref,
                const NoiseModel &noise);

// Exposures at ref.phase_shift + {0, pi/2, pi} against a fixed object field
// with independent noise per exposure.
HologramSet record_psi_set(const CMatrix &object_field, const UpaGeometry &geom, const ReferenceWave &ref,
                           const NoiseModel &noise);

// Phase-shifting recovery of the object field:
//   E_o = (1 - j) / (4 E_r^*) * { I(0) - I(pi/2) + j [I(pi/2) - I(pi)] }
// ref must be the reference used for the first exposure. Throws
// SingularReferenceError where |E_r| vanishes and DomainError when the set is
// inconsistent (mixed geometry or wrong phase steps).
CMatrix psis_recover(const HologramSet &set, const ReferenceWave &ref);

// Emission coefficients E_c = E_r * I obtained by re-illuminating the raw
// hologram with the reference; contains the DC and conjugate terms.
CMatrix naive_reconstruction_weights(const Hologram &holo, const ReferenceWave &ref);

// One CSV row per vertical index (bottom row first), comma separated.
void write_hologram_csv(std::ostream &out, const Hologram &holo);

} // namespace holosense

#endif
