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

#ifndef HOLOSENSE_CSV_HPP
#define HOLOSENSE_CSV_HPP

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>

namespace holosense::csv
{

// 12 significant digits, '.' decimal separator independent of locale;
// non-finite values print as inf / -inf / nan.
std::string format_number(double value);

using Cell = std::variant<double, long long, std::string_view>;

// Writes one comma-separated, LF-terminated record.
void write_row(std::ostream &out, std::initializer_list<Cell> cells);

} // namespace holosense::csv

#endif
