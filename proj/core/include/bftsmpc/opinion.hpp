#pragma once

// Belief-function opinions over a finite frame of candidate trajectories.
//
// A frame holds n_e mutually exclusive hypotheses. Subsets of the frame are
// bitmasks; an opinion assigns mass to nonempty subsets and is stored sparsely
// (absent subsets carry zero mass). Opinions are immutable once validated.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bftsmpc {

/// Subset of a frame: bit i set iff hypothesis i is a member.
struct SubsetId {
  std::uint32_t bits = 0;

  constexpr bool empty() const { return bits == 0; }
  constexpr bool contains(std::size_t i) const { return (bits >> i) & 1u; }
  constexpr bool intersects(SubsetId other) const { return (bits & other.bits) != 0; }
  constexpr bool is_subset_of(SubsetId other) const { return (bits & ~other.bits) == 0; }
  int cardinality() const;

  friend constexpr auto operator<=>(SubsetId, SubsetId) = default;
};

constexpr SubsetId singleton_subset(std::size_t i) { return SubsetId{1u << i}; }

class Frame {
 public:
  static constexpr std::size_t kMaxHypotheses = 16;

  /// Throws Error(InvalidFrame) for empty, oversized, or duplicate labels.
  explicit Frame(std::vector<std::string> labels);

  /// Frame with labels "theta1".."thetaN".
  static Frame indexed(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  SubsetId full() const { return SubsetId{static_cast<std::uint32_t>((1ull << size()) - 1)}; }
  SubsetId singleton(std::size_t i) const;
  bool valid_subset(SubsetId s) const { return !s.empty() && s.is_subset_of(full()); }

  /// "*" for the whole frame, otherwise member labels joined by commas in frame order.
  std::string subset_key(SubsetId s) const;
  /// Inverse of subset_key; member order in the key is irrelevant.
  SubsetId parse_subset_key(std::string_view key) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::vector<std::string> labels_;
};

using MassMap = std::map<SubsetId, double>;

class Opinion {
 public:
  using Entry = std::pair<SubsetId, double>;

  const Frame& frame() const { return frame_; }
  /// Focal elements (nonzero masses), sorted by bitmask.
  const std::vector<Entry>& focal() const { return masses_; }
  double mass(SubsetId s) const;

  friend bool operator==(const Opinion&, const Opinion&) = default;

 private:
  friend Opinion validate_opinion(const Frame&, const MassMap&, bool);
  Opinion(Frame frame, std::vector<Entry> masses)
      : frame_(std::move(frame)), masses_(std::move(masses)) {}

  Frame frame_;
  std::vector<Entry> masses_;
};

inline constexpr double kNormalizationTolerance = 1e-9;

/// Builds an Opinion after checking nonnegativity, the empty set and unit
/// total mass (|sum - 1| <= 1e-9). With `normalize` set, masses are rescaled
/// to sum to one instead of failing the normalization check.
Opinion validate_opinion(const Frame& frame, const MassMap& raw_masses, bool normalize = false);

double belief(const Opinion& o, SubsetId s);
double plausibility(const Opinion& o, SubsetId s);
double uncertainty(const Opinion& o);
Opinion vacuous_opinion(const Frame& frame);

/// Plausibility of every singleton, indexed by hypothesis.
std::vector<double> singleton_plausibilities(const Opinion& o);

/// {"n_e": int, "masses": {"<comma-joined labels>" | "*": real}}
nlohmann::json opinion_to_json(const Opinion& o);
Opinion opinion_from_json(const nlohmann::json& doc, const Frame& frame);

}  // namespace bftsmpc
