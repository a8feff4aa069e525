#include "bftsmpc/strategy.hpp"

#include <algorithm>

#include "bftsmpc/belief_transforms.hpp"
#include "bftsmpc/error.hpp"

namespace bftsmpc {

std::string StrategyKind::name() const {
  switch (type) {
    case StrategyType::MostLikely: return "most-likely";
    case StrategyType::AllModesFixedBeta: return "all-modes";
    case StrategyType::BeliefScaled: return "belief-scaled";
    case StrategyType::InversePlausibility: return "inverse-plausibility";
    case StrategyType::BftTightening: return "bft-tightening";
  }
  return "unknown";
}

StrategyKind StrategyKind::parse(std::string_view name) {
  StrategyKind k;
  if (name == "most-likely") {
    k.type = StrategyType::MostLikely;
  } else if (name == "all-modes") {
    k.type = StrategyType::AllModesFixedBeta;
  } else if (name == "belief-scaled") {
    k.type = StrategyType::BeliefScaled;
  } else if (name == "inverse-plausibility") {
    k.type = StrategyType::InversePlausibility;
  } else if (name == "bft-tightening") {
    k.type = StrategyType::BftTightening;
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown strategy '" + std::string(name) + "'");
  }
  return k;
}

void StrategyKind::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "beta must lie in (0,1)");
  }
  if (type == StrategyType::BftTightening) tightening.validate();
}

std::vector<StrategyKind> all_strategies() {
  std::vector<StrategyKind> out;
  for (auto t : {StrategyType::MostLikely, StrategyType::AllModesFixedBeta,
                 StrategyType::BeliefScaled, StrategyType::InversePlausibility,
                 StrategyType::BftTightening}) {
    StrategyKind k;
    k.type = t;
    out.push_back(k);
  }
  return out;
}

namespace {

std::vector<double> scaled_or_uniform(const Opinion& o, bool& fallback) {
  try {
    fallback = false;
    return scaled_singleton_probabilities(o).p;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllSingletonsZero) throw;
    fallback = true;
    return uniform_probabilities(o.frame()).p;
  }
}

}  // namespace

RiskAssignment assign_risk(const StrategyKind& strategy, const Opinion& o) {
  const auto n = o.frame().size();
  RiskAssignment out;
  out.modes.resize(n);

  switch (strategy.type) {
    case StrategyType::MostLikely: {
      out.probabilities = scaled_or_uniform(o, out.uniform_fallback);
      // max_element returns the first maximum: ties go to the lowest index.
      const auto best = static_cast<std::size_t>(
          std::max_element(out.probabilities.begin(), out.probabilities.end()) -
          out.probabilities.begin());
      for (std::size_t i = 0; i < n; ++i) {
        out.modes[i] = {i == best, i == best ? strategy.beta : 0.0, std::nullopt};
      }
      break;
    }
    case StrategyType::AllModesFixedBeta:
      out.probabilities = scaled_or_uniform(o, out.uniform_fallback);
      for (auto& m : out.modes) m = {true, strategy.beta, std::nullopt};
      break;
    case StrategyType::BeliefScaled:
      out.probabilities = scaled_or_uniform(o, out.uniform_fallback);
      for (std::size_t i = 0; i < n; ++i) out.modes[i] = {true, out.probabilities[i], std::nullopt};
      break;
    case StrategyType::InversePlausibility:
      out.probabilities = inverse_plausibility_transform(o).p;
      for (std::size_t i = 0; i < n; ++i) out.modes[i] = {true, out.probabilities[i], std::nullopt};
      break;
    case StrategyType::BftTightening: {
      const auto pl = singleton_plausibilities(o);
      const double mu = uncertainty(o);
      out.probabilities.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double b = belief(o, singleton_subset(i));
        out.probabilities[i] = b;
        out.modes[i] = {true, b, TighteningDirective{pl[i], mu}};
      }
      break;
    }
  }
  return out;
}

}  // namespace bftsmpc
