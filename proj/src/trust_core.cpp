#include "cloudtrust/trust_core.hpp"

#include "cloudtrust/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace cloudtrust {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Exponent ((gap / tau)^k) of the decay factor.
double decay_exponent(double gap, const DecayParams& params) {
  return std::pow(gap / params.tau, static_cast<int>(params.k));
}

}  // namespace

TrustDegree::TrustDegree(double value) : value_(value) {
  if (!in_unit_interval(value))
    throw_invalid("trust degree out of [0, 1]: " + describe(value));
}

TrustDegree TrustDegree::clamped(double value) {
  if (std::isnan(value))
    throw_invalid("trust degree is NaN");
  return TrustDegree(std::clamp(value, 0.0, 1.0));
}

void DecayParams::validate() const {
  if (k < 1)
    throw_invalid("decay exponent k must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw_invalid("decay time scale tau must be a positive finite number, got " +
                  describe(tau));
}

void InteractionRecord::validate() const {
  if (!std::isfinite(time) || time < 0.0)
    throw_invalid("interaction time must be finite and non-negative, got " +
                  describe(time));
  if (!in_unit_interval(score))
    throw_invalid("interaction score out of [0, 1]: " + describe(score));
}

std::string_view to_string(ReputationGrade grade) noexcept {
  switch (grade) {
    case ReputationGrade::High: return "High";
    case ReputationGrade::Medium: return "Medium";
    case ReputationGrade::Low: return "Low";
  }
  return "Low";
}

ReputationGrade parse_reputation_grade(std::string_view text) {
  if (text == "High" || text == "high") return ReputationGrade::High;
  if (text == "Medium" || text == "medium") return ReputationGrade::Medium;
  if (text == "Low" || text == "low") return ReputationGrade::Low;
  throw_invalid("unknown reputation grade '" + std::string(text) + "'");
}

void ReputationScale::validate() const {
  for (double b : {high, medium, low}) {
    if (!(b >= 0.0 && b <= 0.1))
      throw_invalid("reputation bonus out of [0, 0.1]: " + describe(b));
  }
  if (!(high >= medium && medium >= low))
    throw_invalid("reputation bonus must be monotone: High >= Medium >= Low");
}

ReputationFactor ReputationScale::factor(ReputationGrade grade) const {
  switch (grade) {
    case ReputationGrade::High: return {grade, high};
    case ReputationGrade::Medium: return {grade, medium};
    case ReputationGrade::Low: return {grade, low};
  }
  return {ReputationGrade::Low, low};
}

std::array<double, kSlaMetricCount> SlaMetrics::as_array() const noexcept {
  return {availability, processing_capacity, recovery_time, connectivity,
          peak_load_performance};
}

SlaMetrics SlaMetrics::from_array(const std::array<double, kSlaMetricCount>& v) {
  return SlaMetrics{v[0], v[1], v[2], v[3], v[4]};
}

void SlaMetrics::validate() const {
  const auto values = as_array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!in_unit_interval(values[i]))
      throw_invalid("SLA metric " + std::string(kSlaMetricNames[i]) +
                    " out of [0, 1]: " + describe(values[i]));
  }
}

void SlaWeights::validate() const {
  double sum = 0.0;
  for (double w : values) {
    if (!std::isfinite(w) || w < 0.0)
      throw_invalid("SLA weight must be a non-negative finite number, got " + describe(w));
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw_invalid("SLA weights must sum to 1, got " + describe(sum));
}

TrustChain::TrustChain(std::vector<ChainEdge> edges, std::size_t max_length)
    : edges_(std::move(edges)) {
  if (max_length < 2 || max_length > kMaxChainLength)
    throw_invalid("maximum chain length must lie in [2, 8]");
  if (edges_.size() < 2 || edges_.size() > max_length)
    throw_invalid("trust chain length " + std::to_string(edges_.size()) +
                  " outside [2, " + std::to_string(max_length) + "]");

  std::set<EntityId> seen{edges_.front().from};
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const ChainEdge& e = edges_[i];
    if (e.from == e.to)
      throw_invalid("trust chain edge is a self-loop on '" + e.from + "'");
    if (!std::isfinite(e.weight) || !in_unit_interval(e.weight))
      throw_invalid("trust chain edge weight out of [0, 1]: " + describe(e.weight));
    if (i > 0 && edges_[i - 1].to != e.from)
      throw_invalid("trust chain is not connected at '" + e.from + "'");
    if (!seen.insert(e.to).second)
      throw_invalid("trust chain revisits '" + e.to + "'");
  }
}

std::vector<EntityId> TrustChain::nodes() const {
  std::vector<EntityId> out;
  out.reserve(edges_.size() + 1);
  out.push_back(edges_.front().from);
  for (const auto& e : edges_) out.push_back(e.to);
  return out;
}

double TrustChain::total_weight() const noexcept {
  double sum = 0.0;
  for (const auto& e : edges_) sum += e.weight;
  return sum;
}

std::string_view roman(TrustLevel level) noexcept {
  switch (level) {
    case TrustLevel::NoOpinion: return "I";
    case TrustLevel::LowDistrust: return "II";
    case TrustLevel::MediumTrust: return "III";
    case TrustLevel::HighTrust: return "IV";
    case TrustLevel::CompleteTrust: return "V";
  }
  return "I";
}

std::string_view label(TrustLevel level) noexcept {
  switch (level) {
    case TrustLevel::NoOpinion: return "No Opinion";
    case TrustLevel::LowDistrust: return "Low distrust";
    case TrustLevel::MediumTrust: return "Medium trust";
    case TrustLevel::HighTrust: return "High trust";
    case TrustLevel::CompleteTrust: return "Complete trust";
  }
  return "No Opinion";
}

TrustLevel parse_trust_level(std::string_view text) {
  static constexpr std::array<std::string_view, 5> numerals = {"I", "II", "III", "IV", "V"};
  for (std::size_t i = 0; i < numerals.size(); ++i) {
    if (text == numerals[i]) return static_cast<TrustLevel>(i + 1);
  }
  int n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec == std::errc{} && ptr == text.data() + text.size() && n >= 1 && n <= 5)
    return static_cast<TrustLevel>(n);
  throw_invalid("unknown trust level '" + std::string(text) + "'");
}

double decay_factor(double t_current, double t_last, const DecayParams& params) {
  params.validate();
  if (!std::isfinite(t_current) || !std::isfinite(t_last))
    throw_invalid("decay timestamps must be finite");
  if (t_current < t_last)
    throw_invalid("decay requested with t_current " + describe(t_current) +
                  " earlier than t_last " + describe(t_last));
  return std::exp(-decay_exponent(t_current - t_last, params));
}

TrustDegree direct_trust(std::span<const InteractionRecord> history, double t_now,
                         const DecayParams& params, const ReputationFactor& rf) {
  params.validate();
  if (history.empty())
    throw_invalid("direct trust needs at least one interaction");
  if (!std::isfinite(t_now))
    throw_invalid("direct trust evaluation time must be finite");
  if (!(rf.bonus >= 0.0 && rf.bonus <= 0.1))
    throw_invalid("reputation bonus out of [0, 0.1]: " + describe(rf.bonus));

  // The weighted mean only depends on ratios of decay factors, so every
  // exponent is shifted by the smallest one. The freshest record then weighs
  // exactly 1 and long gaps cannot underflow the denominator to zero.
  std::vector<double> exponents;
  exponents.reserve(history.size());
  double min_score = 1.0;
  double max_score = 0.0;
  for (const auto& r : history) {
    r.validate();
    if (r.time > t_now)
      throw_invalid("interaction at " + describe(r.time) + " lies after t_now " +
                    describe(t_now));
    exponents.push_back(decay_exponent(t_now - r.time, params));
    min_score = std::min(min_score, r.score);
    max_score = std::max(max_score, r.score);
  }
  const double shift = *std::min_element(exponents.begin(), exponents.end());

  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double w = std::exp(-(exponents[i] - shift));
    numerator += w * history[i].score;
    denominator += w;
  }
  const double mean = std::clamp(numerator / denominator, min_score, max_score);
  return TrustDegree::clamped(mean + rf.bonus);
}

double edge_weight(std::uint64_t n_positive, std::uint64_t n_total, double sl) {
  if (n_total == 0)
    throw_invalid("edge weight needs at least one interaction");
  if (n_positive > n_total)
    throw_invalid("positive interactions exceed the total");
  if (!in_unit_interval(sl))
    throw_invalid("satisfaction level out of [0, 1]: " + describe(sl));
  // Ratio first: equal ratios (1/2, 100/200) give bit-identical weights.
  const double ratio = static_cast<double>(n_positive) / static_cast<double>(n_total);
  return ratio * sl;
}

double satisfaction_level(const SlaMetrics& metrics, const SlaWeights& weights) {
  weights.validate();
  metrics.validate();
  const auto values = metrics.as_array();
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < kSlaMetricCount; ++i) {
    weighted += weights.values[i] * values[i];
    total += weights.values[i];
  }
  return std::clamp(weighted / total, 0.0, 1.0);
}

TrustDegree chain_trust(const TrustChain& chain) {
  double weighted = 0.0;
  double total = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& e : chain.edges()) {
    weighted += e.weight * e.direct_trust.value();
    total += e.weight;
    lo = std::min(lo, e.direct_trust.value());
    hi = std::max(hi, e.direct_trust.value());
  }
  if (!(total > 0.0))
    throw_invalid("trust chain carries no weight");
  return TrustDegree(std::clamp(weighted / total, lo, hi));
}

TrustDegree aggregate_recommendations(std::span<const ChainValue> chains) {
  if (chains.empty())
    throw_invalid("no recommendations to aggregate");
  double weighted = 0.0;
  double total = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& c : chains) {
    if (!std::isfinite(c.total_weight) || c.total_weight < 0.0)
      throw_invalid("chain weight must be a non-negative finite number, got " +
                    describe(c.total_weight));
    if (c.total_weight == 0.0) continue;
    weighted += c.total_weight * c.trust.value();
    total += c.total_weight;
    lo = std::min(lo, c.trust.value());
    hi = std::max(hi, c.trust.value());
  }
  if (!(total > 0.0))
    throw_invalid("all recommendation chains carry zero weight");
  return TrustDegree(std::clamp(weighted / total, lo, hi));
}

TrustDegree resolve_trust_degree(std::size_t n_direct, std::size_t n_recommended,
                                 std::optional<TrustDegree> direct,
                                 std::optional<TrustDegree> recommended) {
  if (direct.has_value() != (n_direct >= 1))
    throw_invalid("direct trust presence does not match n_d = " + std::to_string(n_direct));
  if (recommended.has_value() != (n_recommended >= 1))
    throw_invalid("recommended trust presence does not match n_r = " +
                  std::to_string(n_recommended));
  if (direct) return *direct;
  if (recommended) return *recommended;
  return TrustDegree{};
}

TrustLevel classify_level(TrustDegree td) noexcept {
  const double v = td.value();
  if (v == 0.0) return TrustLevel::NoOpinion;
  if (v < 0.5) return TrustLevel::LowDistrust;
  if (v == 0.5) return TrustLevel::MediumTrust;
  if (v < 1.0) return TrustLevel::HighTrust;
  return TrustLevel::CompleteTrust;
}

}  // namespace cloudtrust
