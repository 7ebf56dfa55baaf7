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

#include "holosense/analysis.hpp"
#include "holosense/error.hpp"
#include "holosense/experiment.hpp"
#include "holosense/holography.hpp"
#include "holosense/manifest.hpp"
#include "holosense/patterns.hpp"
#include "holosense/pmcs.hpp"
#include "holosense/prony.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace holosense;

namespace
{
py::tuple peak_tuple(const Peak &p)
{
    return py::make_tuple(p.theta_deg, p.phi_deg, p.value);
}
} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Hologram-based channel sensing for holographic interference surfaces";
    m.attr("__version__") = version();

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base.ptr());
    py::register_exception<SingularReferenceError>(m, "SingularReferenceError", base.ptr());
    py::register_exception<IllConditionedError>(m, "IllConditionedError", base.ptr());
    py::register_exception<PairingError>(m, "PairingError", base.ptr());
    py::register_exception<EstimationError>(m, "EstimationError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::class_<UpaGeometry>(m, "Geometry")
        .def(py::init(&UpaGeometry::make), py::arg("n_v") = 16, py::arg("n_h") = 16, py::arg("spacing_v_wl") = 0.5,
             py::arg("spacing_h_wl") = 0.5, py::arg("f_c") = 3.5e9)
        .def_readonly("n_v", &UpaGeometry::n_v)
        .def_readonly("n_h", &UpaGeometry::n_h)
        .def_readonly("d_v", &UpaGeometry::d_v)
        .def_readonly("d_h", &UpaGeometry::d_h)
        .def_readonly("f_c", &UpaGeometry::f_c)
        .def_property_readonly("unit_count", &UpaGeometry::unit_count)
        .def("__repr__", [](const UpaGeometry &g) {
            return "Geometry(n_v=" + std::to_string(g.n_v) + ", n_h=" + std::to_string(g.n_h) + ")";
        });

    py::class_<LosUser>(m, "User")
        .def(py::init([](double theta_deg, double phi_deg, Complex b) {
                 return LosUser{deg2rad(theta_deg), deg2rad(phi_deg), b};
             }),
             py::arg("theta_deg"), py::arg("phi_deg"), py::arg("b") = Complex{1.0, 0.0})
        .def_property_readonly("theta_deg", [](const LosUser &u) { return rad2deg(u.theta); })
        .def_property_readonly("phi_deg", [](const LosUser &u) { return rad2deg(u.phi); })
        .def_readonly("b", &LosUser::b);

    m.def(
        "steering_vector",
        [](const UpaGeometry &g, double theta_deg, double phi_deg) {
            return steering_vector(g, deg2rad(theta_deg), deg2rad(phi_deg));
        },
        py::arg("geometry"), py::arg("theta_deg"), py::arg("phi_deg"));
    m.def(
        "received_field",
        [](const UpaGeometry &g, const std::vector<LosUser> &users) { return to_grid(g, received_field(g, users)); },
        py::arg("geometry"), py::arg("users"), "Object field on the n_v x n_h grid.");
    m.def(
        "user_channel", [](const UpaGeometry &g, const LosUser &u) { return to_grid(g, user_channel(g, u)); },
        py::arg("geometry"), py::arg("user"));
    m.def("noise_sigma_for_snr", &noise_sigma_for_snr, py::arg("field"), py::arg("snr_db"));

    m.def(
        "record",
        [](const CMatrix &field, const UpaGeometry &g, double phase_shift, double sigma, std::uint64_t seed) {
            return record(field, g, ReferenceWave::normal_incidence().shifted(phase_shift), NoiseModel{sigma, seed})
                .intensity;
        },
        py::arg("field"), py::arg("geometry"), py::arg("phase_shift") = 0.0, py::arg("sigma") = 0.0,
        py::arg("seed") = 0, "Hologram intensity under a normally incident unit reference wave.");
    m.def(
        "psis",
        [](const CMatrix &field, const UpaGeometry &g, double sigma, std::uint64_t seed) {
            const ReferenceWave ref = ReferenceWave::normal_incidence();
            return psis_recover(record_psi_set(field, g, ref, NoiseModel{sigma, seed}), ref);
        },
        py::arg("field"), py::arg("geometry"), py::arg("sigma") = 0.0, py::arg("seed") = 0,
        "Record the three phase-shifted holograms and return the recovered object field.");

    py::class_<prony::Estimate>(m, "PronyEstimate")
        .def_readonly("coeffs", &prony::Estimate::coeffs)
        .def_readonly("roots_all", &prony::Estimate::roots_all)
        .def_readonly("roots", &prony::Estimate::roots_signal)
        .def_readonly("amplitudes", &prony::Estimate::amplitudes)
        .def_readonly("residual", &prony::Estimate::residual);
    m.def(
        "prony",
        [](const CVector &samples, int n_signals, int est_order, const std::string &solver) {
            return prony::estimate(samples, {n_signals, est_order, 0.1, prony::parse_solver(solver)});
        },
        py::arg("samples"), py::arg("n_signals"), py::arg("est_order"), py::arg("solver") = "pseudoinverse");

    py::class_<pmcs::UserEstimate>(m, "UserEstimate")
        .def_readonly("z_h", &pmcs::UserEstimate::z_h)
        .def_readonly("z_v", &pmcs::UserEstimate::z_v)
        .def_readonly("b", &pmcs::UserEstimate::b)
        .def_readonly("theta_deg", &pmcs::UserEstimate::theta_deg)
        .def_readonly("phi_deg", &pmcs::UserEstimate::phi_deg)
        .def_readonly("accepted", &pmcs::UserEstimate::accepted)
        .def_readonly("channel", &pmcs::UserEstimate::channel);
    m.def(
        "segment",
        [](const CMatrix &field, const UpaGeometry &g, int n_users, int est_order) {
            return pmcs::segment(field, pmcs::Config::for_geometry(g, n_users, est_order), g).users;
        },
        py::arg("field"), py::arg("geometry"), py::arg("n_users"), py::arg("est_order") = 10);
    m.def("nmse_db", &pmcs::nmse_db, py::arg("estimate"), py::arg("truth"));

    m.def(
        "pattern",
        [](const CVector &weights, const UpaGeometry &g, double step_deg) {
            const PatternResult p = array_pattern(weights, g, AngularGrid::front_hemisphere(step_deg));
            py::list peaks;
            for (const Peak &pk : p.peaks)
                peaks.append(peak_tuple(pk));
            return py::make_tuple(p.grid.thetas(), p.grid.phis(), p.gain_db, peaks);
        },
        py::arg("weights"), py::arg("geometry"), py::arg("step_deg") = 1.0,
        "Returns (thetas, phis, gain_db, peaks) over the front half space.");
    m.def(
        "beamscan",
        [](const CMatrix &field, const UpaGeometry &g, double resolution_deg) {
            py::list peaks;
            for (const Peak &pk : analysis::beamscan_oracle(field, g, resolution_deg).peaks)
                peaks.append(peak_tuple(pk));
            return peaks;
        },
        py::arg("field"), py::arg("geometry"), py::arg("resolution_deg") = 1.0);
    m.def("separation_threshold", &analysis::separation_threshold, py::arg("K"));

    m.def(
        "run_experiment",
        [](const std::filesystem::path &config, const std::optional<std::string> &kind,
           std::optional<std::uint64_t> seed, int jobs, const std::filesystem::path &out_dir) {
            cli::RunOptions opts;
            if (kind)
                opts.kind = cli::parse_kind(*kind);
            opts.seed = seed;
            opts.jobs = jobs;
            opts.out_dir = out_dir;
            cli::RunReport report;
            {
                py::gil_scoped_release release;
                report = cli::run(cli::load_config(config), opts);
            }
            return report.manifest;
        },
        py::arg("config"), py::arg("kind") = py::none(), py::arg("seed") = py::none(), py::arg("jobs") = 1,
        py::arg("out_dir") = ".", "Run one experiment and return the manifest path.");
}
