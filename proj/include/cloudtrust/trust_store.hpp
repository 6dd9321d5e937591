#pragma once

// Per-entity trust state: the Direct Trust Table (interaction histories per
// trustee and service) and the Recommended List Table (peers known per
// service, with the last recommended trust value seen for each), plus JSON
// snapshots of both.

#include "cloudtrust/trust_core.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrust {

struct DirectKey {
  EntityId trustee;
  ServiceId service;

  friend auto operator<=>(const DirectKey&, const DirectKey&) = default;
};

class DirectEntry {
public:
  const std::vector<InteractionRecord>& history() const noexcept { return history_; }
  double last_time() const noexcept { return history_.empty() ? 0.0 : history_.back().time; }
  std::uint64_t n_positive() const noexcept;
  std::uint64_t n_negative() const noexcept { return n_total() - n_positive(); }
  std::uint64_t n_total() const noexcept { return history_.size(); }
  // Arithmetic mean of the recorded scores; the satisfaction level used for
  // this relationship's edge weight.
  double mean_score() const noexcept;

  std::optional<TrustDegree> cached_trust() const noexcept { return cached_td_; }
  double cached_at() const noexcept { return cached_at_; }

private:
  friend class DirectTrustTable;

  std::vector<InteractionRecord> history_;
  std::optional<TrustDegree> cached_td_;
  double cached_at_ = 0.0;
  DecayParams cached_params_;
  double cached_bonus_ = 0.0;
};

class DirectTrustTable {
public:
  explicit DirectTrustTable(EntityId owner);

  const EntityId& owner() const noexcept { return owner_; }

  // 0 keeps every record; otherwise the oldest records are dropped once the
  // history for a key exceeds `cap`.
  void set_history_cap(std::size_t cap);
  std::size_t history_cap() const noexcept { return history_cap_; }

  /// Appends `record` to the (trustee, service) history and invalidates its
  /// cached trust. Rejects self-interaction and timestamps earlier than the
  /// last one recorded for that key.
  void record_interaction(const EntityId& trustee, const ServiceId& service,
                          const InteractionRecord& record);

  /// Direct trust toward `trustee` for `service` at `t_now`, or nullopt when
  /// there is no history. Refreshes the entry's cache.
  std::optional<TrustDegree> lookup_direct(const EntityId& trustee, const ServiceId& service,
                                           double t_now, const DecayParams& params,
                                           const ReputationFactor& rf);

  const DirectEntry* find(const EntityId& trustee, const ServiceId& service) const;
  const std::map<DirectKey, DirectEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  // Histories only; caches are not part of a table's observable state.
  friend bool operator==(const DirectTrustTable& a, const DirectTrustTable& b);

private:
  EntityId owner_;
  std::size_t history_cap_ = 0;
  std::map<DirectKey, DirectEntry> entries_;
};

struct RecommendedEntry {
  std::optional<TrustDegree> td;
  double updated_at = 0.0;

  friend bool operator==(const RecommendedEntry&, const RecommendedEntry&) = default;
};

class RecommendedListTable {
public:
  using PeerMap = std::map<EntityId, RecommendedEntry>;

  explicit RecommendedListTable(EntityId owner);

  const EntityId& owner() const noexcept { return owner_; }

  /// Registers `peer` as known for `service` without a trust value. No-op
  /// when the peer is already listed.
  void add_peer(const ServiceId& service, const EntityId& peer, double t_now);

  /// Upserts the recommended trust for `peer` under `service`.
  void update_recommended(const ServiceId& service, const EntityId& peer, TrustDegree td,
                          double t_now);

  const PeerMap* peers(const ServiceId& service) const;
  const std::map<ServiceId, PeerMap>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept;

  friend bool operator==(const RecommendedListTable&, const RecommendedListTable&) = default;

private:
  EntityId owner_;
  std::map<ServiceId, PeerMap> entries_;
};

// Both tables of one entity; the unit of snapshot/restore.
struct TrustTables {
  explicit TrustTables(const EntityId& owner) : direct(owner), recommended(owner) {}

  const EntityId& owner() const noexcept { return direct.owner(); }

  DirectTrustTable direct;
  RecommendedListTable recommended;

  friend bool operator==(const TrustTables&, const TrustTables&) = default;
};

/// JSON document with keys `owner`, `direct` and `recommended`.
std::string snapshot(const TrustTables& tables);

/// Inverse of `snapshot`. Throws ParseError on malformed input.
TrustTables restore(std::string_view document);

}  // namespace cloudtrust
