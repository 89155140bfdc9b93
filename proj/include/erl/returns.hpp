#pragma once

#include <cstddef>
#include <span>

namespace erl {

// sum_{k>=0} gamma^k r_{t+k} over the remainder of a finite episode.
// Throws InputError when t is outside the trace.
double discounted_return(std::span<const double> rewards, double gamma, std::size_t t = 0);

// Undiscounted episode total, accumulated front to back.
double episode_fitness(std::span<const double> rewards);

}  // namespace erl
