#include "cloudtrust/trust_store.hpp"

#include "cloudtrust/error.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <numeric>

namespace cloudtrust {

using detail::json;
using detail::require;
using detail::require_array;

std::uint64_t DirectEntry::n_positive() const noexcept {
  return static_cast<std::uint64_t>(
      std::count_if(history_.begin(), history_.end(),
                    [](const InteractionRecord& r) { return r.positive; }));
}

double DirectEntry::mean_score() const noexcept {
  if (history_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : history_) sum += r.score;
  return std::clamp(sum / static_cast<double>(history_.size()), 0.0, 1.0);
}

DirectTrustTable::DirectTrustTable(EntityId owner) : owner_(std::move(owner)) {
  if (owner_.empty())
    throw_invalid("table owner id must not be empty");
}

void DirectTrustTable::set_history_cap(std::size_t cap) {
  history_cap_ = cap;
  if (cap == 0) return;
  for (auto& [key, entry] : entries_) {
    if (entry.history_.size() > cap) {
      entry.history_.erase(entry.history_.begin(),
                           entry.history_.end() - static_cast<std::ptrdiff_t>(cap));
      entry.cached_td_.reset();
    }
  }
}

void DirectTrustTable::record_interaction(const EntityId& trustee, const ServiceId& service,
                                          const InteractionRecord& record) {
  if (trustee == owner_)
    throw_invalid("entity '" + owner_ + "' cannot record an interaction with itself");
  if (trustee.empty() || service.empty())
    throw_invalid("trustee and service ids must not be empty");
  record.validate();

  auto it = entries_.find(DirectKey{trustee, service});
  if (it != entries_.end() && !it->second.history_.empty() &&
      record.time < it->second.last_time()) {
    throw_invalid("interaction for (" + trustee + ", " + service +
                  ") is earlier than the last recorded one");
  }
  DirectEntry& entry = it != entries_.end() ? it->second : entries_[DirectKey{trustee, service}];
  entry.history_.push_back(record);
  if (history_cap_ != 0 && entry.history_.size() > history_cap_)
    entry.history_.erase(entry.history_.begin());
  entry.cached_td_.reset();
}

std::optional<TrustDegree> DirectTrustTable::lookup_direct(const EntityId& trustee,
                                                           const ServiceId& service,
                                                           double t_now,
                                                           const DecayParams& params,
                                                           const ReputationFactor& rf) {
  auto it = entries_.find(DirectKey{trustee, service});
  if (it == entries_.end() || it->second.history_.empty()) return std::nullopt;

  DirectEntry& entry = it->second;
  if (entry.cached_td_ && entry.cached_at_ == t_now && entry.cached_params_.k == params.k &&
      entry.cached_params_.tau == params.tau && entry.cached_bonus_ == rf.bonus) {
    return entry.cached_td_;
  }
  const TrustDegree td = direct_trust(entry.history_, t_now, params, rf);
  entry.cached_td_ = td;
  entry.cached_at_ = t_now;
  entry.cached_params_ = params;
  entry.cached_bonus_ = rf.bonus;
  return td;
}

const DirectEntry* DirectTrustTable::find(const EntityId& trustee,
                                          const ServiceId& service) const {
  auto it = entries_.find(DirectKey{trustee, service});
  return it == entries_.end() ? nullptr : &it->second;
}

bool operator==(const DirectTrustTable& a, const DirectTrustTable& b) {
  if (a.owner_ != b.owner_ || a.entries_.size() != b.entries_.size()) return false;
  return std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                    [](const auto& x, const auto& y) {
                      return x.first == y.first && x.second.history() == y.second.history();
                    });
}

RecommendedListTable::RecommendedListTable(EntityId owner) : owner_(std::move(owner)) {
  if (owner_.empty())
    throw_invalid("table owner id must not be empty");
}

void RecommendedListTable::add_peer(const ServiceId& service, const EntityId& peer,
                                    double t_now) {
  if (peer == owner_)
    throw_invalid("entity '" + owner_ + "' cannot list itself as a recommender");
  if (peer.empty() || service.empty())
    throw_invalid("peer and service ids must not be empty");
  entries_[service].try_emplace(peer, RecommendedEntry{std::nullopt, t_now});
}

void RecommendedListTable::update_recommended(const ServiceId& service, const EntityId& peer,
                                              TrustDegree td, double t_now) {
  if (peer == owner_)
    throw_invalid("entity '" + owner_ + "' cannot list itself as a recommender");
  if (peer.empty() || service.empty())
    throw_invalid("peer and service ids must not be empty");
  entries_[service].insert_or_assign(peer, RecommendedEntry{td, t_now});
}

const RecommendedListTable::PeerMap* RecommendedListTable::peers(
    const ServiceId& service) const {
  auto it = entries_.find(service);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t RecommendedListTable::size() const noexcept {
  return std::accumulate(entries_.begin(), entries_.end(), std::size_t{0},
                         [](std::size_t n, const auto& kv) { return n + kv.second.size(); });
}

std::string snapshot(const TrustTables& tables) {
  json direct = json::array();
  for (const auto& [key, entry] : tables.direct.entries()) {
    json history = json::array();
    for (const auto& r : entry.history())
      history.push_back({{"t", r.time}, {"score", r.score}, {"positive", r.positive}});
    direct.push_back({{"trustee", key.trustee}, {"service", key.service}, {"history", history}});
  }

  json recommended = json::array();
  for (const auto& [service, peers] : tables.recommended.entries()) {
    for (const auto& [peer, entry] : peers) {
      recommended.push_back({{"service", service},
                             {"peer", peer},
                             {"td", entry.td ? json(entry.td->value()) : json(nullptr)},
                             {"updated_at", entry.updated_at}});
    }
  }

  json doc = {{"owner", tables.owner()}, {"direct", direct}, {"recommended", recommended}};
  return doc.dump(2) + "\n";
}

TrustTables restore(std::string_view document) {
  const json doc = detail::parse_document(document);
  return detail::with_schema_errors([&] {
    TrustTables tables(require(doc, "owner").get<std::string>());

    for (const json& entry : require_array(doc, "direct")) {
      const auto trustee = require(entry, "trustee").get<std::string>();
      const auto service = require(entry, "service").get<std::string>();
      const json& history = require_array(entry, "history");
      if (history.empty())
        throw ParseError("direct entry (" + trustee + ", " + service +
                             ") has an empty history",
                         0);
      for (const json& r : history) {
        tables.direct.record_interaction(
            trustee, service,
            InteractionRecord{require(r, "t").get<double>(), require(r, "score").get<double>(),
                              require(r, "positive").get<bool>()});
      }
    }

    for (const json& entry : require_array(doc, "recommended")) {
      const auto service = require(entry, "service").get<std::string>();
      const auto peer = require(entry, "peer").get<std::string>();
      const json& td = require(entry, "td");
      const double updated_at = require(entry, "updated_at").get<double>();
      if (td.is_null()) {
        tables.recommended.add_peer(service, peer, updated_at);
      } else {
        tables.recommended.update_recommended(service, peer, TrustDegree(td.get<double>()),
                                              updated_at);
      }
    }
    return tables;
  });
}

}  // namespace cloudtrust
