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

#include "holosense/random.hpp"
#include "holosense/error.hpp"

#include <cmath>

namespace holosense
{

double wrap_angle(double rad)
{
    double w = std::remainder(rad, 2.0 * kPi); // [-pi, pi]
    if (w <= -kPi)
        w += 2.0 * kPi;
    return w;
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto &s : issues)
              msg += "\n  - " + s;
          return msg;
      }()),
      issues_(std::move(issues))
{
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream)
{
    return splitmix64(splitmix64(root) ^ (stream * 0xD1B54A32D192ED03ULL + 1));
}

Complex complex_gaussian(Engine &engine, double sigma)
{
    std::normal_distribution<double> normal(0.0, sigma / std::sqrt(2.0));
    const double re = normal(engine);
    const double im = normal(engine);
    return {re, im};
}

Complex uniform_in_disk(Engine &engine, double radius)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // sqrt of a uniform radius fraction gives a uniform area density; the
    // half-open draw keeps |w| strictly below radius
    const double r = radius * std::sqrt(unit(engine));
    const double a = 2.0 * kPi * unit(engine);
    return std::polar(r, a);
}

double uniform(Engine &engine, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(engine);
}

} // namespace holosense
