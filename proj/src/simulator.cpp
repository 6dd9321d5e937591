#include "cloudtrust/simulator.hpp"

#include "cloudtrust/error.hpp"
#include "json_util.hpp"

#include <boost/random/beta_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace cloudtrust {

using detail::json;
using detail::require;
using detail::require_array;

namespace {

constexpr std::uint64_t kMaxArrivalTicks = 10'000'000;

// Ids end up in CSV rows and `a>b>c` chain renderings.
void validate_id(std::string_view kind, const std::string& id) {
  if (id.empty())
    throw_invalid(std::string(kind) + " id must not be empty");
  for (unsigned char c : id) {
    if (c <= 0x20 || c == 0x7f || c == ',' || c == '"' || c == '>')
      throw_invalid(std::string(kind) + " id '" + id +
                    "' contains whitespace, a control character, ',', '\"' or '>'");
  }
}

std::uint64_t low32(std::uint64_t v) { return v & 0xffffffffULL; }
std::uint64_t high32(std::uint64_t v) { return v >> 32; }

std::mt19937_64 arrival_engine(std::uint64_t seed) {
  std::seed_seq seq{low32(seed), high32(seed), std::uint64_t{0x61727276}};
  return std::mt19937_64(seq);
}

// Each granted request gets its own stream, so a draw depends only on the
// seed, the tick and the event index.
std::mt19937_64 event_engine(std::uint64_t seed, std::uint64_t tick, std::size_t event) {
  std::seed_seq seq{low32(seed), high32(seed), low32(tick), high32(tick),
                    low32(event), high32(event)};
  return std::mt19937_64(seq);
}

}  // namespace

void SlaProfile::validate() const {
  for (std::size_t i = 0; i < quality.size(); ++i) {
    if (!(quality[i] >= 0.0 && quality[i] <= 1.0))
      throw_invalid("SLA quality for " + std::string(kSlaMetricNames[i]) + " out of [0, 1]");
  }
  if (!(concentration > 0.0) || !std::isfinite(concentration))
    throw_invalid("SLA concentration must be a positive finite number");
}

const EntityConfig* ScenarioConfig::find_entity(const EntityId& id) const {
  auto it = std::find_if(entities.begin(), entities.end(),
                         [&](const EntityConfig& e) { return e.id == id; });
  return it == entities.end() ? nullptr : &*it;
}

const ServiceConfig* ScenarioConfig::find_service(const ServiceId& id) const {
  auto it = std::find_if(services.begin(), services.end(),
                         [&](const ServiceConfig& s) { return s.id == id; });
  return it == services.end() ? nullptr : &*it;
}

std::vector<EntityId> ScenarioConfig::providers_of(const ServiceConfig& service) const {
  std::vector<EntityId> out;
  if (service.providers.empty()) {
    for (const auto& e : entities) out.push_back(e.id);
  } else {
    out = service.providers;
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ScenarioConfig::validate() const {
  if (entities.empty())
    throw_invalid("scenario needs at least one entity");
  if (services.empty())
    throw_invalid("scenario needs at least one service");

  std::set<EntityId> entity_ids;
  for (const auto& e : entities) {
    validate_id("entity", e.id);
    if (!entity_ids.insert(e.id).second)
      throw_invalid("duplicate entity id '" + e.id + "'");
    e.profile.validate();
  }

  std::set<ServiceId> service_ids;
  for (const auto& s : services) {
    validate_id("service", s.id);
    if (!service_ids.insert(s.id).second)
      throw_invalid("duplicate service id '" + s.id + "'");
    std::set<EntityId> seen;
    for (const auto& p : s.providers) {
      if (!entity_ids.contains(p))
        throw_invalid("service '" + s.id + "' lists unknown provider '" + p + "'");
      if (!seen.insert(p).second)
        throw_invalid("service '" + s.id + "' lists provider '" + p + "' twice");
    }
  }

  auto offers = [&](const ServiceConfig& s, const EntityId& id) {
    return s.providers.empty() ||
           std::find(s.providers.begin(), s.providers.end(), id) != s.providers.end();
  };

  std::uint64_t first_tick = std::numeric_limits<std::uint64_t>::max();
  for (const auto& r : schedule) {
    if (!entity_ids.contains(r.requester))
      throw_invalid("schedule names unknown requester '" + r.requester + "'");
    const ServiceConfig* s = find_service(r.service);
    if (s == nullptr)
      throw_invalid("schedule names unknown service '" + r.service + "'");
    if (r.provider) {
      if (!entity_ids.contains(*r.provider))
        throw_invalid("schedule names unknown provider '" + *r.provider + "'");
      if (*r.provider == r.requester)
        throw_invalid("schedule entry at tick " + std::to_string(r.tick) + " has '" +
                      r.requester + "' requesting from itself");
      if (!offers(*s, *r.provider))
        throw_invalid("'" + *r.provider + "' does not offer service '" + r.service + "'");
    }
    first_tick = std::min(first_tick, r.tick);
  }
  if (arrivals) {
    if (!(arrivals->rate >= 0.0) || !std::isfinite(arrivals->rate))
      throw_invalid("arrival rate must be a non-negative finite number");
    if (arrivals->ticks > kMaxArrivalTicks)
      throw_invalid("arrival process spans more than 10^7 ticks");
    if (arrivals->ticks > 0) first_tick = 0;
  }

  for (const auto& h : history) {
    if (!entity_ids.contains(h.owner) || !entity_ids.contains(h.trustee))
      throw_invalid("prior interaction names an unknown entity");
    if (h.owner == h.trustee)
      throw_invalid("prior interaction of '" + h.owner + "' with itself");
    const ServiceConfig* s = find_service(h.service);
    if (s == nullptr)
      throw_invalid("prior interaction names unknown service '" + h.service + "'");
    if (!offers(*s, h.trustee))
      throw_invalid("'" + h.trustee + "' does not offer service '" + h.service + "'");
    h.record.validate();
    if (first_tick != std::numeric_limits<std::uint64_t>::max() &&
        h.record.time > static_cast<double>(first_tick))
      throw_invalid("prior interaction at t=" + format_decimal(h.record.time) +
                    " lies after the first request");
  }

  decay.validate();
  reputation.validate();
  sla_weights.validate();
  if (max_chain_length < 2 || max_chain_length > kMaxChainLength)
    throw_invalid("max_chain_length must lie in [2, 8]");
  if (!(positive_threshold >= 0.0 && positive_threshold <= 1.0))
    throw_invalid("positive_threshold must lie in [0, 1]");
}

namespace {

SlaProfile parse_profile(const json& entity) {
  SlaProfile profile;
  if (auto it = entity.find("sla"); it != entity.end()) {
    if (it->is_number()) {
      profile.quality.fill(it->get<double>());
    } else {
      for (std::size_t i = 0; i < kSlaMetricCount; ++i)
        profile.quality[i] = require(*it, kSlaMetricNames[i].data()).get<double>();
    }
  }
  profile.concentration = entity.value("concentration", profile.concentration);
  return profile;
}

SlaWeights parse_weights(const json& value) {
  SlaWeights weights;
  if (value.is_array()) {
    if (value.size() != kSlaMetricCount)
      throw ParseError("sla_weights must hold five numbers", 0);
    for (std::size_t i = 0; i < kSlaMetricCount; ++i) weights.values[i] = value[i].get<double>();
  } else {
    for (std::size_t i = 0; i < kSlaMetricCount; ++i)
      weights.values[i] = require(value, kSlaMetricNames[i].data()).get<double>();
  }
  return weights;
}

TrustLevel parse_level(const json& value) {
  if (value.is_number_integer()) return parse_trust_level(std::to_string(value.get<int>()));
  return parse_trust_level(value.get<std::string>());
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view document) {
  const json doc = detail::parse_document(document);
  return detail::with_schema_errors([&] {
    if (!doc.is_object())
      throw ParseError("scenario must be a JSON object", 0);
    ScenarioConfig config;
    config.seed = doc.value("seed", std::uint64_t{0});

    for (const json& e : require_array(doc, "entities")) {
      EntityConfig entity;
      entity.id = require(e, "id").get<std::string>();
      entity.grade = parse_reputation_grade(e.value("reputation", std::string("Low")));
      entity.profile = parse_profile(e);
      config.entities.push_back(std::move(entity));
    }

    for (const json& s : require_array(doc, "services")) {
      ServiceConfig service;
      service.id = require(s, "id").get<std::string>();
      if (auto it = s.find("required_level"); it != s.end())
        service.required = parse_level(*it);
      if (auto it = s.find("providers"); it != s.end())
        service.providers = it->get<std::vector<std::string>>();
      config.services.push_back(std::move(service));
    }

    if (auto it = doc.find("schedule"); it != doc.end()) {
      for (const json& r : *it) {
        ScheduledRequest request;
        request.tick = require(r, "tick").get<std::uint64_t>();
        request.requester = require(r, "requester").get<std::string>();
        request.service = require(r, "service").get<std::string>();
        if (auto p = r.find("provider"); p != r.end() && !p->is_null())
          request.provider = p->get<std::string>();
        config.schedule.push_back(std::move(request));
      }
    }

    if (auto it = doc.find("arrivals"); it != doc.end() && !it->is_null()) {
      config.arrivals = ArrivalProcess{require(*it, "ticks").get<std::uint64_t>(),
                                       require(*it, "rate").get<double>()};
    }

    if (auto it = doc.find("decay"); it != doc.end()) {
      config.decay.k = it->value("k", config.decay.k);
      config.decay.tau = it->value("tau", config.decay.tau);
    }
    if (auto it = doc.find("reputation_bonus"); it != doc.end()) {
      config.reputation.high = it->value("High", config.reputation.high);
      config.reputation.medium = it->value("Medium", config.reputation.medium);
      config.reputation.low = it->value("Low", config.reputation.low);
    }
    if (auto it = doc.find("sla_weights"); it != doc.end())
      config.sla_weights = parse_weights(*it);
    config.max_chain_length = doc.value("max_chain_length", config.max_chain_length);
    config.positive_threshold = doc.value("positive_threshold", config.positive_threshold);
    config.history_cap = doc.value("history_cap", config.history_cap);
    config.bootstrap_recommended =
        doc.value("bootstrap_recommended", config.bootstrap_recommended);
    config.record_graphs = doc.value("record_graphs", config.record_graphs);

    if (auto it = doc.find("history"); it != doc.end()) {
      for (const json& h : *it) {
        InteractionRecord record{require(h, "t").get<double>(),
                                 require(h, "score").get<double>(), false};
        record.positive = h.value("positive", record.score >= config.positive_threshold);
        config.history.push_back(PriorInteraction{require(h, "owner").get<std::string>(),
                                                   require(h, "trustee").get<std::string>(),
                                                   require(h, "service").get<std::string>(),
                                                   record});
      }
    }
    return config;
  });
}

std::string_view to_string(ResolutionPath path) noexcept {
  switch (path) {
    case ResolutionPath::Direct: return "direct";
    case ResolutionPath::Recommended: return "recommended";
    case ResolutionPath::Ignorance: return "ignorance";
  }
  return "ignorance";
}

bool gate_access(TrustDegree td, TrustLevel required) noexcept {
  return static_cast<int>(classify_level(td)) >= static_cast<int>(required);
}

SlaMetrics sample_sla(const SlaProfile& profile, std::mt19937_64& rng) {
  std::array<double, kSlaMetricCount> values{};
  for (std::size_t i = 0; i < kSlaMetricCount; ++i) {
    const double q = profile.quality[i];
    if (q <= 0.0 || q >= 1.0) {
      values[i] = std::clamp(q, 0.0, 1.0);
      continue;
    }
    boost::random::beta_distribution<double> beta(q * profile.concentration,
                                                  (1.0 - q) * profile.concentration);
    values[i] = std::clamp(beta(rng), 0.0, 1.0);
  }
  return SlaMetrics::from_array(values);
}

namespace {

struct Resolution {
  ResolutionPath path = ResolutionPath::Ignorance;
  bool broadcast = false;
  TrustDegree td;
  TrustGraph graph;
};

class Simulation {
public:
  explicit Simulation(const ScenarioConfig& config) : config_(config) {
    for (const auto& e : config_.entities) {
      auto [it, inserted] = result_.tables.try_emplace(e.id, e.id);
      it->second.direct.set_history_cap(config_.history_cap);
    }
    if (config_.bootstrap_recommended) {
      for (const auto& s : config_.services) {
        const auto providers = config_.providers_of(s);
        for (auto& [owner, tables] : result_.tables) {
          for (const auto& p : providers)
            if (p != owner) tables.recommended.add_peer(s.id, p, 0.0);
        }
      }
    }
    for (const auto& h : config_.history)
      result_.tables.at(h.owner).direct.record_interaction(h.trustee, h.service, h.record);
  }

  SimulationResult finish() && { return std::move(result_); }

  void process(std::size_t event, const ScheduledRequest& request) {
    const ServiceConfig& service = *config_.find_service(request.service);
    const auto tick = static_cast<double>(request.tick);

    std::vector<EntityId> candidates;
    if (request.provider) {
      candidates.push_back(*request.provider);
    } else {
      for (auto& p : config_.providers_of(service))
        if (p != request.requester) candidates.push_back(std::move(p));
    }
    if (candidates.empty()) {
      ++result_.skipped;
      return;
    }

    const TrustGraph full = service_graph(service.id, tick);
    std::optional<Resolution> best;
    EntityId chosen;
    for (const auto& candidate : candidates) {
      Resolution r = resolve(request.requester, candidate, service.id, tick, full);
      if (!best || r.td > best->td) {
        best = std::move(r);
        chosen = candidate;
      }
    }

    TraceRecord record;
    record.event = event;
    record.tick = request.tick;
    record.requester = request.requester;
    record.provider = chosen;
    record.service = service.id;
    record.path = best->path;
    record.broadcast = best->broadcast;
    record.td = best->td;
    record.level = classify_level(best->td);
    record.granted = gate_access(best->td, service.required);

    TrustTables& own = result_.tables.at(request.requester);
    if (best->path == ResolutionPath::Recommended)
      own.recommended.update_recommended(service.id, chosen, best->td, tick);

    if (record.granted) {
      auto rng = event_engine(config_.seed, request.tick, event);
      const SlaMetrics sla = sample_sla(config_.find_entity(chosen)->profile, rng);
      const double score = satisfaction_level(sla, config_.sla_weights);
      own.direct.record_interaction(
          chosen, service.id, InteractionRecord{tick, score, score >= config_.positive_threshold});
      record.sla = sla;
      record.score = score;
    }

    result_.trace.push_back(std::move(record));
    if (config_.record_graphs) result_.graphs.push_back(std::move(best->graph));
  }

private:
  ReputationFactor factor_of(const EntityId& id) const {
    return config_.reputation.factor(config_.find_entity(id)->grade);
  }

  // Every entity's direct relationships for `service`, evaluated at `tick`.
  TrustGraph service_graph(const ServiceId& service, double tick) {
    TrustGraph graph;
    for (auto& [owner, tables] : result_.tables) {
      graph.add_node(owner);
      for (const auto& [key, entry] : tables.direct.entries()) {
        if (key.service != service) continue;
        const auto td = tables.direct.lookup_direct(key.trustee, key.service, tick,
                                                    config_.decay, factor_of(key.trustee));
        graph.add_edge(owner, key.trustee, service,
                       GraphEdge{entry.n_positive(), entry.n_total(), entry.mean_score(), *td});
      }
    }
    return graph;
  }

  // Keeps only the edges owned (i.e. reported) by `owners`.
  static TrustGraph restrict_to(const TrustGraph& graph, const std::set<EntityId>& owners) {
    TrustGraph out;
    for (const auto& n : graph.nodes()) out.add_node(n);
    graph.for_each_edge([&](const EntityId& from, const EntityId& to, const ServiceId& service,
                            const GraphEdge& edge) {
      if (owners.contains(from)) out.add_edge(from, to, service, edge);
    });
    return out;
  }

  Resolution resolve(const EntityId& requester, const EntityId& provider,
                     const ServiceId& service, double tick, const TrustGraph& full) {
    TrustTables& own = result_.tables.at(requester);

    // (1) Direct Trust Table.
    if (auto direct = own.direct.lookup_direct(provider, service, tick, config_.decay,
                                               factor_of(provider))) {
      return Resolution{ResolutionPath::Direct, false,
                        resolve_trust_degree(1, 0, direct, std::nullopt), full};
    }

    // (2) Peers already in the Recommended List Table answer from their
    // direct tables.
    std::set<EntityId> listed{requester};
    if (const auto* peers = own.recommended.peers(service))
      for (const auto& [peer, entry] : *peers) listed.insert(peer);
    TrustGraph known = restrict_to(full, listed);
    if (auto rec = evaluate_recommendation(known, requester, provider, service,
                                           config_.max_chain_length)) {
      return Resolution{ResolutionPath::Recommended, false,
                        resolve_trust_degree(0, rec->chain_count, std::nullopt, rec->trust),
                        std::move(known)};
    }

    // (3) Broadcast: every entity holding a direct entry for the service.
    if (known.edge_count() != full.edge_count()) {
      if (auto rec = evaluate_recommendation(full, requester, provider, service,
                                             config_.max_chain_length)) {
        for (const auto& peer : full.nodes())
          if (peer != requester && full.out_edges(peer, service) != nullptr)
            own.recommended.add_peer(service, peer, tick);
        return Resolution{ResolutionPath::Recommended, true,
                          resolve_trust_degree(0, rec->chain_count, std::nullopt, rec->trust),
                          full};
      }
    }

    return Resolution{ResolutionPath::Ignorance, false,
                      resolve_trust_degree(0, 0, std::nullopt, std::nullopt), full};
  }

  const ScenarioConfig& config_;
  SimulationResult result_;
};

std::vector<ScheduledRequest> build_events(const ScenarioConfig& config) {
  std::vector<ScheduledRequest> events = config.schedule;
  if (config.arrivals && config.arrivals->ticks > 0 && config.arrivals->rate > 0.0) {
    auto rng = arrival_engine(config.seed);
    boost::random::poisson_distribution<std::uint64_t, double> count(config.arrivals->rate);
    boost::random::uniform_int_distribution<std::size_t> pick_entity(
        0, config.entities.size() - 1);
    boost::random::uniform_int_distribution<std::size_t> pick_service(
        0, config.services.size() - 1);
    for (std::uint64_t tick = 0; tick < config.arrivals->ticks; ++tick) {
      const std::uint64_t n = count(rng);
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto& requester = config.entities[pick_entity(rng)].id;
        const auto& service = config.services[pick_service(rng)].id;
        events.push_back(ScheduledRequest{tick, requester, service, std::nullopt});
      }
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ScheduledRequest& a, const ScheduledRequest& b) {
                     return a.tick < b.tick;
                   });
  return events;
}

}  // namespace

SimulationResult run(const ScenarioConfig& config) {
  config.validate();
  Simulation sim(config);
  const auto events = build_events(config);
  for (std::size_t i = 0; i < events.size(); ++i) sim.process(i, events[i]);
  return std::move(sim).finish();
}

std::string format_decimal(double value) {
  char buf[64];
  const auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 4);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.tick << ',' << r.requester << ',' << r.provider << ',' << r.service << ','
        << to_string(r.path) << ',' << format_decimal(r.td.value()) << ',' << roman(r.level)
        << ',' << (r.granted ? "granted" : "denied") << ','
        << (r.score ? format_decimal(*r.score) : std::string()) << '\n';
  }
}

}  // namespace cloudtrust
