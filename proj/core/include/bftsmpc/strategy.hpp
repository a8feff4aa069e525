#pragma once

// Policies turning an opinion about a participant's candidate trajectories
// into per-mode risk parameters (and, for the tightening policy, scaling
// directives).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bftsmpc/opinion.hpp"
#include "bftsmpc/risk_constraints.hpp"

namespace bftsmpc {

enum class StrategyType {
  MostLikely,
  AllModesFixedBeta,
  BeliefScaled,
  InversePlausibility,
  BftTightening,
};

inline constexpr double kDefaultFixedBeta = 0.85;

struct StrategyKind {
  StrategyType type = StrategyType::InversePlausibility;
  /// Risk parameter for MostLikely and AllModesFixedBeta.
  double beta = kDefaultFixedBeta;
  /// Used by BftTightening only.
  TighteningParams tightening;

  /// CLI name: most-likely, all-modes, belief-scaled, inverse-plausibility, bft-tightening.
  std::string name() const;
  /// Throws Error(InvalidParameter) on an unknown name or out-of-range beta/tightening.
  static StrategyKind parse(std::string_view name);
  void validate() const;
};

std::vector<StrategyKind> all_strategies();

struct TighteningDirective {
  double plausibility = 1.0;
  double uncertainty = 0.0;
};

struct ModeRisk {
  bool included = true;
  double beta = 0.0;
  std::optional<TighteningDirective> tighten;
};

struct RiskAssignment {
  /// One entry per mode of the frame; dropped modes have included == false.
  std::vector<ModeRisk> modes;
  /// The per-mode numbers the strategy derived its risk parameters from.
  std::vector<double> probabilities;
  /// Singleton scaling failed (no singleton mass) and a uniform vector was used.
  bool uniform_fallback = false;
};

RiskAssignment assign_risk(const StrategyKind& strategy, const Opinion& o);

}  // namespace bftsmpc
