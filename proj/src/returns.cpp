#include "erl/returns.hpp"

#include "erl/errors.hpp"

namespace erl {

double discounted_return(std::span<const double> rewards, double gamma, std::size_t t) {
  if (t >= rewards.size()) throw InputError("discounted_return: index out of range");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("discounted_return: gamma must lie in (0, 1]");
  double total = 0.0;
  double weight = 1.0;
  for (std::size_t i = t; i < rewards.size(); ++i) {
    total += weight * rewards[i];
    weight *= gamma;
  }
  return total;
}

double episode_fitness(std::span<const double> rewards) {
  double total = 0.0;
  for (double r : rewards) total += r;
  return total;
}

}  // namespace erl
