// Copyright 2026 The ecst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ecst {

using Complex = std::complex<double>;

// Ground hyperfine levels of a trapped atom. The excited level is
// adiabatically eliminated by the reflection model and never stored.
enum class AtomLevel : std::uint8_t { g = 0, f = 1 };

// Threshold (on/off) photodetector outcome: Off = vacuum, On = any photons.
enum class Threshold : std::uint8_t { Off = 0, On = 1 };

// Outcome of an atomic measurement in the diagonal basis |±> = (|g> ± |f>)/sqrt(2).
enum class AtomOutcome : std::uint8_t { Plus = 0, Minus = 1 };

// Pauli-frame correction operators, acting in the {g, f} basis:
// Z|g> = |g>, Z|f> = -|f>; X swaps g and f; iY|g> = -|f>, iY|f> = |g>.
enum class Pauli : std::uint8_t { I = 0, Z = 1, X = 2, iY = 3 };

const char* to_cstr(AtomLevel level);
const char* to_cstr(Threshold t);
const char* to_cstr(AtomOutcome o);
const char* to_cstr(Pauli p);

// Raised when the simulated state disagrees with what the protocol model
// guarantees (e.g. an impossible detector pattern carrying real weight).
class ModelViolation : public std::runtime_error {
 public:
  explicit ModelViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ecst
