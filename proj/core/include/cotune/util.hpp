// Copyright 2026 The cotune Authors
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

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cotune {

// Base class for every error the library reports. Callers that only care
// about "something in the inputs was wrong" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: unparsable JSON/CSV, unknown names, bad labels.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain constraint.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Seeded generator with a portable output sequence. std::mt19937_64 output
// is fixed by the standard; the standard distributions are not, so bounded
// integers and unit reals are derived here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream seed for (seed, stream) pairs, e.g. one per tree.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// FNV-1a 64-bit, used for content hashes in manifests and model versions.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

// Worker count for parallel sections: hardware concurrency, capped by
// COTUNE_THREADS when that is set to a positive integer. Never less than 1.
unsigned worker_threads();

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace cotune
