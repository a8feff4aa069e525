#include "bftsmpc/opinion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bftsmpc/error.hpp"
#include "compensated_sum.hpp"

namespace bftsmpc {

int SubsetId::cardinality() const { return std::popcount(bits); }

Frame::Frame(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw Error(ErrorCode::InvalidFrame, "frame needs at least one hypothesis");
  }
  if (labels_.size() > kMaxHypotheses) {
    throw Error(ErrorCode::InvalidFrame,
                "frame size " + std::to_string(labels_.size()) + " exceeds 16");
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (l.empty() || l == "*" || l.find(',') != std::string::npos) {
      throw Error(ErrorCode::InvalidFrame, "illegal hypothesis label '" + l + "'");
    }
    if (!seen.insert(l).second) {
      throw Error(ErrorCode::InvalidFrame, "duplicate hypothesis label '" + l + "'");
    }
  }
}

Frame Frame::indexed(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("theta" + std::to_string(i + 1));
  return Frame(std::move(labels));
}

std::optional<std::size_t> Frame::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

SubsetId Frame::singleton(std::size_t i) const {
  if (i >= size()) {
    throw Error(ErrorCode::InvalidParameter, "hypothesis index " + std::to_string(i) +
                                                 " outside frame of size " +
                                                 std::to_string(size()));
  }
  return singleton_subset(i);
}

std::string Frame::subset_key(SubsetId s) const {
  if (s == full()) return "*";
  std::string key;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!s.contains(i)) continue;
    if (!key.empty()) key += ',';
    key += labels_[i];
  }
  return key;
}

SubsetId Frame::parse_subset_key(std::string_view key) const {
  if (key == "*") return full();
  SubsetId s;
  std::size_t start = 0;
  while (start <= key.size()) {
    const auto end = std::min(key.find(',', start), key.size());
    auto token = key.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    const auto idx = index_of(token);
    if (!idx) {
      throw Error(ErrorCode::ParseError, "unknown hypothesis '" + std::string(token) +
                                             "' in subset key '" + std::string(key) + "'");
    }
    s.bits |= singleton_subset(*idx).bits;
    start = end + 1;
  }
  return s;
}

double Opinion::mass(SubsetId s) const {
  auto it = std::lower_bound(masses_.begin(), masses_.end(), s,
                             [](const Entry& e, SubsetId key) { return e.first < key; });
  return (it != masses_.end() && it->first == s) ? it->second : 0.0;
}

Opinion validate_opinion(const Frame& frame, const MassMap& raw_masses, bool normalize) {
  detail::CompensatedSum total;
  for (const auto& [s, m] : raw_masses) {
    if (s.empty()) {
      if (m != 0.0) {
        std::ostringstream msg;
        msg << "empty set carries mass " << m;
        throw Error(ErrorCode::EmptySetMass, msg.str());
      }
      continue;
    }
    if (!s.is_subset_of(frame.full())) {
      throw Error(ErrorCode::InvalidParameter,
                  "subset mask " + std::to_string(s.bits) + " outside frame");
    }
    if (!std::isfinite(m) || m < 0.0) {
      std::ostringstream msg;
      msg << "subset {" << frame.subset_key(s) << "} has mass " << m;
      throw Error(ErrorCode::NegativeMass, msg.str());
    }
    total += m;
  }
  const double sum = total.value();
  double scale = 1.0;
  if (normalize) {
    if (!(sum > 0.0)) {
      throw Error(ErrorCode::NormalizationViolation, "cannot normalize zero total mass");
    }
    scale = 1.0 / sum;
  } else if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "masses sum to " << sum;
    throw Error(ErrorCode::NormalizationViolation, msg.str());
  }

  std::vector<Opinion::Entry> entries;
  entries.reserve(raw_masses.size());
  for (const auto& [s, m] : raw_masses) {
    if (s.empty() || m == 0.0) continue;
    entries.emplace_back(s, m * scale);
  }
  return Opinion(frame, std::move(entries));
}

double belief(const Opinion& o, SubsetId s) { return o.mass(s); }

double plausibility(const Opinion& o, SubsetId s) {
  detail::CompensatedSum pl;
  for (const auto& [focal, m] : o.focal()) {
    if (focal.intersects(s)) pl += m;
  }
  return std::clamp(pl.value(), 0.0, 1.0);
}

double uncertainty(const Opinion& o) { return o.mass(o.frame().full()); }

Opinion vacuous_opinion(const Frame& frame) {
  return validate_opinion(frame, MassMap{{frame.full(), 1.0}});
}

std::vector<double> singleton_plausibilities(const Opinion& o) {
  const auto n = o.frame().size();
  std::vector<detail::CompensatedSum> acc(n);
  for (const auto& [focal, m] : o.focal()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (focal.contains(i)) acc[i] += m;
    }
  }
  std::vector<double> pl(n);
  for (std::size_t i = 0; i < n; ++i) pl[i] = std::clamp(acc[i].value(), 0.0, 1.0);
  return pl;
}

nlohmann::json opinion_to_json(const Opinion& o) {
  nlohmann::json masses = nlohmann::json::object();
  for (const auto& [s, m] : o.focal()) masses[o.frame().subset_key(s)] = m;
  return {{"n_e", o.frame().size()}, {"masses", std::move(masses)}};
}

Opinion opinion_from_json(const nlohmann::json& doc, const Frame& frame) {
  if (!doc.is_object() || !doc.contains("masses") || !doc.at("masses").is_object()) {
    throw Error(ErrorCode::ParseError, "opinion must be an object with a 'masses' object");
  }
  if (doc.contains("n_e") && doc.at("n_e").get<std::size_t>() != frame.size()) {
    throw Error(ErrorCode::ParseError,
                "opinion n_e=" + doc.at("n_e").dump() + " does not match frame size " +
                    std::to_string(frame.size()));
  }
  MassMap raw;
  for (const auto& [key, value] : doc.at("masses").items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::ParseError, "mass for '" + key + "' is not a number");
    }
    raw[frame.parse_subset_key(key)] += value.get<double>();
  }
  return validate_opinion(frame, raw);
}

}  // namespace bftsmpc
