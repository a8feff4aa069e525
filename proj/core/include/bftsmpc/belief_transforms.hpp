#pragma once

// Belief-to-probability maps used to derive per-mode risk parameters.

#include <cstddef>
#include <vector>

#include "bftsmpc/opinion.hpp"

namespace bftsmpc {

struct ProbabilityVector {
  Frame frame;
  std::vector<double> p;

  double operator[](std::size_t i) const { return p.at(i); }
};

/// Share of a composite set's mass that goes to hypothesis i, proportional to
/// the inverse singleton plausibility. Zero when Pl({theta_i}) is zero.
/// Throws HypothesisNotInSet when i is not a member of s.
double redistribution_factor(const Opinion& o, std::size_t i, SubsetId s);

/// Inverse plausibility transformation. Singleton masses are kept; the mass of
/// every composite focal set is split among its members by
/// redistribution_factor. The result satisfies b_i <= p_i <= Pl({theta_i}).
ProbabilityVector inverse_plausibility_transform(const Opinion& o);

/// Singleton masses rescaled to unit sum. Throws AllSingletonsZero when no
/// singleton carries mass (e.g. the vacuous opinion).
ProbabilityVector scaled_singleton_probabilities(const Opinion& o);

/// Uniform vector over the frame; the fallback when singleton scaling fails.
ProbabilityVector uniform_probabilities(const Frame& frame);

}  // namespace bftsmpc
