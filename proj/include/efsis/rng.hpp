#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace efsis {

/// Engine used for every stochastic step. mt19937_64 output is fixed by the
/// standard; the helpers below avoid std::*_distribution, whose output is
/// implementation-defined, so seeded results agree across standard libraries.
using Rng = std::mt19937_64;

/// Child seed for a task identified by (master, tag, index).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index);

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform real in [0, 1).
double uniform_unit(Rng& rng);

/// Standard normal draw (Marsaglia polar method).
double standard_normal(Rng& rng);

} // namespace efsis
