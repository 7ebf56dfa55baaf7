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

#ifndef HOLOSENSE_ERROR_HPP
#define HOLOSENSE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace holosense
{

// Root of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error
{
public:
    using Error::Error;
};

// Input carries no information (e.g. an all-zero data matrix).
class DegenerateInputError : public Error
{
public:
    using Error::Error;
};

// Reference wave vanishes at a unit, so the object wave cannot be divided out.
class SingularReferenceError : public Error
{
public:
    using Error::Error;
};

class IllConditionedError : public Error
{
public:
    IllConditionedError(const std::string &what, double condition_number)
        : Error(what), condition_number_(condition_number) {}
    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

// Horizontal and vertical amplitude estimates could not be matched.
// candidates() lists the competing assignments (horizontal index i pairs with
// vertical index candidate[i]).
class PairingError : public Error
{
public:
    PairingError(const std::string &what, std::vector<std::vector<std::size_t>> candidates)
        : Error(what), candidates_(std::move(candidates)) {}
    const std::vector<std::vector<std::size_t>> &candidates() const noexcept { return candidates_; }

private:
    std::vector<std::vector<std::size_t>> candidates_;
};

// The estimator could not produce the requested number of components.
class EstimationError : public Error
{
public:
    using Error::Error;
};

// Experiment configuration could not be parsed or failed validation.
// issues() holds one message per offending field.
class ConfigError : public Error
{
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string> &issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

} // namespace holosense

#endif
