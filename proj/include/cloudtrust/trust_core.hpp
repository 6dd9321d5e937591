#pragma once

// Trust calculus: time decay, direct trust, edge weights, SLA satisfaction,
// chain trust, recommendation aggregation, evidence resolution and the five
// trust levels. Everything here is a pure function of its arguments.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrust {

using EntityId = std::string;
using ServiceId = std::string;

inline constexpr std::size_t kDefaultMaxChainLength = 4;
inline constexpr std::size_t kMaxChainLength = 8;

// A trust value in [0, 1]. The checked constructor rejects anything outside
// the interval; calculus results go through `clamped`.
class TrustDegree {
public:
  constexpr TrustDegree() noexcept = default;
  explicit TrustDegree(double value);

  static TrustDegree clamped(double value);

  constexpr double value() const noexcept { return value_; }

  friend constexpr auto operator<=>(TrustDegree, TrustDegree) = default;

private:
  double value_ = 0.0;
};

struct DecayParams {
  unsigned k = 1;
  double tau = 1.0;

  void validate() const;
};

struct InteractionRecord {
  double time = 0.0;
  double score = 0.0;
  bool positive = false;

  void validate() const;
  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

enum class ReputationGrade { Low, Medium, High };

std::string_view to_string(ReputationGrade grade) noexcept;
ReputationGrade parse_reputation_grade(std::string_view text);

struct ReputationFactor {
  ReputationGrade grade = ReputationGrade::Low;
  double bonus = 0.0;
};

// Grade -> additive bonus. Each bonus lies in [0, 0.1] and the mapping is
// monotone in the grade.
struct ReputationScale {
  double high = 0.10;
  double medium = 0.05;
  double low = 0.0;

  void validate() const;
  ReputationFactor factor(ReputationGrade grade) const;
};

enum class SlaMetric : std::size_t {
  Availability,
  ProcessingCapacity,
  RecoveryTime,
  Connectivity,
  PeakLoadPerformance,
};

inline constexpr std::size_t kSlaMetricCount = 5;
inline constexpr std::array<std::string_view, kSlaMetricCount> kSlaMetricNames = {
    "availability", "processing_capacity", "recovery_time", "connectivity",
    "peak_load_performance"};

// Observed service quality, every field normalised so that 1 is best.
struct SlaMetrics {
  double availability = 0.0;
  double processing_capacity = 0.0;
  double recovery_time = 0.0;
  double connectivity = 0.0;
  double peak_load_performance = 0.0;

  std::array<double, kSlaMetricCount> as_array() const noexcept;
  static SlaMetrics from_array(const std::array<double, kSlaMetricCount>& values);
  void validate() const;
  friend bool operator==(const SlaMetrics&, const SlaMetrics&) = default;
};

struct SlaWeights {
  std::array<double, kSlaMetricCount> values{0.2, 0.2, 0.2, 0.2, 0.2};

  void validate() const;
};

struct ChainEdge {
  EntityId from;
  EntityId to;
  double weight = 0.0;
  TrustDegree direct_trust;

  friend bool operator==(const ChainEdge&, const ChainEdge&) = default;
};

// Simple directed path trustor -> ... -> trustee through at least one
// intermediary.
class TrustChain {
public:
  explicit TrustChain(std::vector<ChainEdge> edges,
                      std::size_t max_length = kDefaultMaxChainLength);

  const std::vector<ChainEdge>& edges() const noexcept { return edges_; }
  std::size_t length() const noexcept { return edges_.size(); }
  std::vector<EntityId> nodes() const;
  double total_weight() const noexcept;

  friend bool operator==(const TrustChain&, const TrustChain&) = default;

private:
  std::vector<ChainEdge> edges_;
};

enum class TrustLevel : int {
  NoOpinion = 1,
  LowDistrust = 2,
  MediumTrust = 3,
  HighTrust = 4,
  CompleteTrust = 5,
};

std::string_view roman(TrustLevel level) noexcept;
std::string_view label(TrustLevel level) noexcept;
// Accepts "I".."V" or "1".."5".
TrustLevel parse_trust_level(std::string_view text);

/// Forgetting factor exp(-((t_current - t_last) / tau)^k), in (0, 1] up to
/// floating-point underflow. Throws if the clock went backwards.
double decay_factor(double t_current, double t_last, const DecayParams& params);

/// Decay-weighted mean of the interaction scores at `t_now`, plus the
/// reputation bonus, clamped to [0, 1]. The history must be non-empty and no
/// record may lie in the future.
TrustDegree direct_trust(std::span<const InteractionRecord> history, double t_now,
                         const DecayParams& params, const ReputationFactor& rf);

/// (n_positive * sl) / n_total.
double edge_weight(std::uint64_t n_positive, std::uint64_t n_total, double sl);

/// Weighted mean of the five SLA metrics.
double satisfaction_level(const SlaMetrics& metrics, const SlaWeights& weights);

/// Weight-averaged direct trust along the chain's edges.
TrustDegree chain_trust(const TrustChain& chain);

struct ChainValue {
  TrustDegree trust;
  double total_weight = 0.0;
};

/// Combines per-chain trusts, each weighted by the chain's summed edge weight.
TrustDegree aggregate_recommendations(std::span<const ChainValue> chains);

/// Picks direct trust, recommended trust, or the ignorance value 0 depending
/// on which evidence exists. Direct evidence wins when both are present.
TrustDegree resolve_trust_degree(std::size_t n_direct, std::size_t n_recommended,
                                 std::optional<TrustDegree> direct,
                                 std::optional<TrustDegree> recommended);

TrustLevel classify_level(TrustDegree td) noexcept;

}  // namespace cloudtrust
