#pragma once

// Deterministic discrete-event simulation of a trust-gated file-sharing
// service. Each request runs the trust lookup protocol (direct table,
// recommended list, recommendation broadcast), gates access on the service's
// required trust level and, when granted, samples the provider's SLA and
// records the interaction.

#include "cloudtrust/chain_engine.hpp"
#include "cloudtrust/trust_core.hpp"
#include "cloudtrust/trust_store.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrust {

// True service quality of a provider: the mean of each SLA metric and how
// tightly samples concentrate around it (beta distribution with
// alpha + beta = concentration). A mean of exactly 0 or 1 is a point mass.
struct SlaProfile {
  std::array<double, kSlaMetricCount> quality{1.0, 1.0, 1.0, 1.0, 1.0};
  double concentration = 20.0;

  void validate() const;
};

struct EntityConfig {
  EntityId id;
  ReputationGrade grade = ReputationGrade::Low;
  SlaProfile profile;
};

struct ServiceConfig {
  ServiceId id;
  TrustLevel required = TrustLevel::NoOpinion;
  // Entities offering the service; empty means every entity.
  std::vector<EntityId> providers;
};

struct ScheduledRequest {
  std::uint64_t tick = 0;
  EntityId requester;
  ServiceId service;
  // When absent, the requester picks the best-trusted provider.
  std::optional<EntityId> provider;
};

// Poisson arrivals: every tick in [0, ticks) draws Poisson(rate) requests
// from uniformly chosen requesters for uniformly chosen services.
struct ArrivalProcess {
  std::uint64_t ticks = 0;
  double rate = 0.0;
};

// Interaction history present before tick 0.
struct PriorInteraction {
  EntityId owner;
  EntityId trustee;
  ServiceId service;
  InteractionRecord record;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::vector<EntityConfig> entities;
  std::vector<ServiceConfig> services;
  std::vector<ScheduledRequest> schedule;
  std::optional<ArrivalProcess> arrivals;
  std::vector<PriorInteraction> history;

  DecayParams decay;
  ReputationScale reputation;
  SlaWeights sla_weights;
  std::size_t max_chain_length = kDefaultMaxChainLength;
  double positive_threshold = 0.5;
  std::size_t history_cap = 0;
  // Seed every Recommended List Table with the providers of each service.
  bool bootstrap_recommended = true;
  // Keep the graph each resolution was computed from, for replay.
  bool record_graphs = false;

  /// Throws Error(InvalidArgument) describing the first problem found.
  void validate() const;

  const EntityConfig* find_entity(const EntityId& id) const;
  const ServiceConfig* find_service(const ServiceId& id) const;
  std::vector<EntityId> providers_of(const ServiceConfig& service) const;
};

ScenarioConfig parse_scenario(std::string_view document);

enum class ResolutionPath { Ignorance, Direct, Recommended };

std::string_view to_string(ResolutionPath path) noexcept;

struct TraceRecord {
  std::size_t event = 0;
  std::uint64_t tick = 0;
  EntityId requester;
  EntityId provider;
  ServiceId service;
  ResolutionPath path = ResolutionPath::Ignorance;
  // The recommendation came from peers outside the requester's list.
  bool broadcast = false;
  TrustDegree td;
  TrustLevel level = TrustLevel::NoOpinion;
  bool granted = false;
  std::optional<SlaMetrics> sla;
  std::optional<double> score;
};

struct SimulationResult {
  std::vector<TraceRecord> trace;
  std::map<EntityId, TrustTables> tables;
  // graphs[i] belongs to trace[i]; empty unless record_graphs is set.
  std::vector<TrustGraph> graphs;
  // Requests with no eligible provider.
  std::size_t skipped = 0;
};

/// Granted iff the level of `td` is at least `required` (I < II < ... < V).
bool gate_access(TrustDegree td, TrustLevel required) noexcept;

/// One SLA observation drawn around the profile's true quality.
SlaMetrics sample_sla(const SlaProfile& profile, std::mt19937_64& rng);

SimulationResult run(const ScenarioConfig& config);

inline constexpr std::string_view kTraceHeader =
    "tick,requester,provider,service,path,td,level,decision,score";

/// Fixed 4-decimal rendering, ties to even.
std::string format_decimal(double value);

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace cloudtrust
