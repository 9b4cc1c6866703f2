// Copyright 2026 The aggrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace aggrobust {

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

/// Strict parse: the whole string must be consumed. Throws ValidationError.
double parse_double(std::string_view s);

/// Fixed-point rendering with `digits` decimals (CLI output).
std::string format_fixed(double v, int digits);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t h = 14695981039346656037ull);

std::string hex64(std::uint64_t v);

}  // namespace aggrobust
