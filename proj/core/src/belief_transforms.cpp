#include "bftsmpc/belief_transforms.hpp"

#include <algorithm>

#include "bftsmpc/error.hpp"
#include "compensated_sum.hpp"

namespace bftsmpc {
namespace {

// Inverse plausibilities with 0 standing in for 1/0; see redistribution_factor.
std::vector<double> inverse_plausibilities(const std::vector<double>& pl) {
  std::vector<double> inv(pl.size(), 0.0);
  for (std::size_t i = 0; i < pl.size(); ++i) {
    if (pl[i] > 0.0) inv[i] = 1.0 / pl[i];
  }
  return inv;
}

double factor_from_inverses(const std::vector<double>& inv, std::size_t i, SubsetId s) {
  if (inv[i] == 0.0) return 0.0;
  detail::CompensatedSum denom;
  for (std::size_t j = 0; j < inv.size(); ++j) {
    if (s.contains(j)) denom += inv[j];
  }
  return std::clamp(inv[i] / denom.value(), 0.0, 1.0);
}

}  // namespace

double redistribution_factor(const Opinion& o, std::size_t i, SubsetId s) {
  if (i >= o.frame().size() || !s.contains(i)) {
    throw Error(ErrorCode::HypothesisNotInSet,
                "hypothesis " + std::to_string(i) + " is not a member of {" +
                    o.frame().subset_key(s) + "}");
  }
  return factor_from_inverses(inverse_plausibilities(singleton_plausibilities(o)), i, s);
}

ProbabilityVector inverse_plausibility_transform(const Opinion& o) {
  const auto n = o.frame().size();
  const auto inv = inverse_plausibilities(singleton_plausibilities(o));

  std::vector<detail::CompensatedSum> acc(n);
  for (const auto& [s, m] : o.focal()) {
    if (s.cardinality() == 1) {
      for (std::size_t i = 0; i < n; ++i) {
        if (s.contains(i)) acc[i] += m;
      }
      continue;
    }
    detail::CompensatedSum denom;
    for (std::size_t j = 0; j < n; ++j) {
      if (s.contains(j)) denom += inv[j];
    }
    // A focal set with positive mass gives every member positive plausibility,
    // so an empty denominator means the opinion itself is corrupt.
    if (!(denom.value() > 0.0)) {
      throw Error(ErrorCode::DegenerateOpinion,
                  "composite set {" + o.frame().subset_key(s) + "} has no admissible recipient");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (s.contains(i)) acc[i] += m * (inv[i] / denom.value());
    }
  }

  ProbabilityVector out{o.frame(), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) out.p[i] = std::clamp(acc[i].value(), 0.0, 1.0);
  return out;
}

ProbabilityVector scaled_singleton_probabilities(const Opinion& o) {
  const auto n = o.frame().size();
  std::vector<double> b(n);
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = o.mass(singleton_subset(i));
    total += b[i];
  }
  if (!(total.value() > 0.0)) {
    throw Error(ErrorCode::AllSingletonsZero, "no singleton carries belief mass");
  }
  for (auto& v : b) v /= total.value();
  return {o.frame(), std::move(b)};
}

ProbabilityVector uniform_probabilities(const Frame& frame) {
  return {frame, std::vector<double>(frame.size(), 1.0 / static_cast<double>(frame.size()))};
}

}  // namespace bftsmpc
