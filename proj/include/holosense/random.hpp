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

#ifndef HOLOSENSE_RANDOM_HPP
#define HOLOSENSE_RANDOM_HPP

#include "holosense/types.hpp"

#include <cstdint>
#include <random>

namespace holosense
{

using Engine = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Seed of the stream-th child of root. Trial seeds are derived as
// derive_seed(derive_seed(root, config_index), trial_index) so that results do
// not depend on how trials are scheduled across workers.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

// Circularly-symmetric complex Gaussian CN(0, sigma^2): real and imaginary
// parts are independent N(0, sigma^2 / 2).
Complex complex_gaussian(Engine &engine, double sigma);

// Uniform draw from the open disk |w| < radius.
Complex uniform_in_disk(Engine &engine, double radius);

double uniform(Engine &engine, double lo, double hi);

} // namespace holosense

#endif
