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

#include "holosense/holography.hpp"
#include "holosense/csv.hpp"
#include "holosense/error.hpp"

#include <cmath>
#include <ostream>

namespace holosense
{

namespace
{
constexpr double kStepTolerance = 1e-12;

void check_shape(const CMatrix &field, const UpaGeometry &geom)
{
    if (field.rows() != geom.n_v || field.cols() != geom.n_h)
        throw DomainError("object field is " + std::to_string(field.rows()) + "x" + std::to_string(field.cols()) +
                          " but the surface is " + std::to_string(geom.n_v) + "x" + std::to_string(geom.n_h));
}
} // namespace

ReferenceWave ReferenceWave::normal_incidence(double amplitude)
{
    if (!(amplitude > 0.0))
        throw DomainError("reference amplitude must be positive");
    ReferenceWave ref;
    ref.amplitude = amplitude;
    ref.k_vec = Eigen::Vector3d::Zero(); // k along x; the surface lies in x = 0
    return ref;
}

ReferenceWave ReferenceWave::shifted(double extra_phase) const
{
    ReferenceWave out = *this;
    out.phase_shift += extra_phase;
    return out;
}

CMatrix reference_field(const UpaGeometry &geom, const ReferenceWave &ref)
{
    CMatrix er(geom.n_v, geom.n_h);
    for (int n = 0; n < geom.n_h; ++n)
        for (int m = 0; m < geom.n_v; ++m)
            er(m, n) = std::polar(ref.amplitude, ref.k_vec.dot(geom.unit_position(m, n)) + ref.phase_shift);
    return er;
}

NoiseSource::NoiseSource(const NoiseModel &model) : sigma_(model.sigma), engine_(model.seed)
{
    if (!(model.sigma >= 0.0) || !std::isfinite(model.sigma))
        throw DomainError("noise sigma must be finite and non-negative");
}

CMatrix NoiseSource::draw(int rows, int cols)
{
    CMatrix w = CMatrix::Zero(rows, cols);
    if (sigma_ == 0.0)
        return w;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w.data()[i] = complex_gaussian(engine_, sigma_);
    return w;
}

double noise_sigma_for_snr(const CMatrix &object_field, double snr_db)
{
    const double power = object_field.squaredNorm() / static_cast<double>(object_field.size());
    return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

Hologram record(const CMatrix &object_field, const UpaGeometry &geom, const ReferenceWave &ref, NoiseSource &noise)
{
    check_shape(object_field, geom);
    const CMatrix total = object_field + noise.draw(geom.n_v, geom.n_h) + reference_field(geom, ref);
    return {total.cwiseAbs2(), ref.phase_shift, geom};
}

Hologram record(const CMatrix &object_field, const UpaGeometry &geom, const ReferenceWave &ref,
                const NoiseModel &noise)
{
    NoiseSource source(noise);
    return record(object_field, geom, ref, source);
}

HologramSet record_psi_set(const CMatrix &object_field, const UpaGeometry &geom, const ReferenceWave &ref,
                           const NoiseModel &noise)
{
    NoiseSource source(noise);
    HologramSet set;
    set.i0 = record(object_field, geom, ref, source);
    set.i_half = record(object_field, geom, ref.shifted(kPi / 2), source);
    set.i_pi = record(object_field, geom, ref.shifted(kPi), source);
    return set;
}

CMatrix psis_recover(const HologramSet &set, const ReferenceWave &ref)
{
    const UpaGeometry &geom = set.i0.geom;
    if (!(set.i_half.geom == geom) || !(set.i_pi.geom == geom))
        throw DomainError("holograms in the set were recorded on different surfaces");
    if (std::abs(set.i0.phase_shift - ref.phase_shift) > kStepTolerance ||
        std::abs(set.i_half.phase_shift - ref.phase_shift - kPi / 2) > kStepTolerance ||
        std::abs(set.i_pi.phase_shift - ref.phase_shift - kPi) > kStepTolerance)
        throw DomainError("hologram set is not stepped by pi/2 from the given reference");

    const CMatrix er = reference_field(geom, ref);
    if ((er.cwiseAbs().array() == 0.0).any())
        throw SingularReferenceError("reference wave vanishes at a surface unit");

    const RMatrix &i0 = set.i0.intensity;
    const RMatrix &ih = set.i_half.intensity;
    const RMatrix &ip = set.i_pi.intensity;
    const CMatrix bracket = (i0 - ih).cast<Complex>() + kJ * (ih - ip).cast<Complex>();
    return (Complex(1.0, -1.0) / 4.0) * bracket.cwiseQuotient(er.conjugate());
}

CMatrix naive_reconstruction_weights(const Hologram &holo, const ReferenceWave &ref)
{
    const CMatrix er = reference_field(holo.geom, ref);
    return er.cwiseProduct(holo.intensity.cast<Complex>());
}

void write_hologram_csv(std::ostream &out, const Hologram &holo)
{
    for (Eigen::Index m = 0; m < holo.intensity.rows(); ++m)
    {
        for (Eigen::Index n = 0; n < holo.intensity.cols(); ++n)
        {
            if (n)
                out << ',';
            out << csv::format_number(holo.intensity(m, n));
        }
        out << '\n';
    }
}

} // namespace holosense
