/*
 * Copyright 2026 The saf-emu authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>

namespace saf {

/// Virtual time in integer nanoseconds. Fixed-point keeps event ordering
/// identical across platforms.
using SimTime = std::int64_t;

inline constexpr SimTime kSimTimeNever = INT64_MAX;

inline SimTime seconds_to_sim(double s) { return static_cast<SimTime>(std::llround(s * 1e9)); }
inline double sim_to_seconds(SimTime t) { return static_cast<double>(t) * 1e-9; }

}  // namespace saf
