#include "cloudtrust/cloudtrust.h"

#include "cloudtrust/chain_engine.hpp"
#include "cloudtrust/error.hpp"
#include "cloudtrust/simulator.hpp"
#include "cloudtrust/trust_core.hpp"
#include "cloudtrust/trust_store.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cloudtrust;

struct ct_graph {
  TrustGraph graph;
};

struct ct_chain_list {
  struct Item {
    std::string nodes;
    double total_weight;
    double trust;
  };
  std::vector<Item> items;
};

struct ct_tables {
  explicit ct_tables(TrustTables t) : tables(std::move(t)) {
    for (const auto& kv : tables.direct.entries()) direct.push_back(&kv);
    for (const auto& [service, peers] : tables.recommended.entries())
      for (const auto& kv : peers) recommended.push_back({&service, &kv});
  }

  TrustTables tables;
  std::vector<const std::pair<const DirectKey, DirectEntry>*> direct;
  std::vector<std::pair<const ServiceId*, const std::pair<const EntityId, RecommendedEntry>*>>
      recommended;
};

struct ct_scenario {
  ScenarioConfig config;
};

struct ct_sim_result {
  SimulationResult result;
};

namespace {

thread_local std::string g_last_error;

ct_status fail(ct_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

ct_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return CT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return CT_ERR_PARSE;
    case ErrorCode::Io: return CT_ERR_IO;
    case ErrorCode::NotFound: return CT_ERR_NOT_FOUND;
  }
  return CT_ERR_INTERNAL;
}

template <class Fn>
ct_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    return fn();
  } catch (const ParseError& e) {
    std::string message = e.what();
    if (e.position() != 0) message += " (byte " + std::to_string(e.position()) + ")";
    return fail(CT_ERR_PARSE, std::move(message));
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CT_ERR_INTERNAL, "unknown error");
  }
}

#define CT_REQUIRE(cond, what)                                   \
  do {                                                           \
    if (!(cond)) return fail(CT_ERR_INVALID_ARGUMENT, (what));   \
  } while (false)

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, std::string("cannot open '") + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, std::string("error while reading '") + path + "'");
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "error while writing '" + path.string() + "'");
}

void make_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorCode::Io, "cannot create directory '" + dir.string() + "'" +
                                   (ec ? ": " + ec.message() : std::string()));
}

std::string join_nodes(const std::vector<EntityId>& nodes) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) out += '>';
    out += nodes[i];
  }
  return out;
}

}  // namespace

extern "C" {

const char* ct_last_error(void) { return g_last_error.c_str(); }

const char* ct_status_string(ct_status status) {
  switch (status) {
    case CT_OK: return "ok";
    case CT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CT_ERR_PARSE: return "parse error";
    case CT_ERR_IO: return "I/O error";
    case CT_ERR_NOT_FOUND: return "not found";
    case CT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ct_version(void) { return "0.1.0"; }

ct_status ct_decay_factor(double t_current, double t_last, unsigned k, double tau,
                          double* out) {
  CT_REQUIRE(out != nullptr, "null output pointer");
  return guarded([&] {
    *out = decay_factor(t_current, t_last, DecayParams{k, tau});
    return CT_OK;
  });
}

ct_status ct_classify_level(double td, int* out_level) {
  CT_REQUIRE(out_level != nullptr, "null output pointer");
  return guarded([&] {
    *out_level = static_cast<int>(classify_level(TrustDegree(td)));
    return CT_OK;
  });
}

const char* ct_level_roman(int level) {
  if (level < CT_LEVEL_MIN || level > CT_LEVEL_MAX) return nullptr;
  return roman(static_cast<TrustLevel>(level)).data();
}

const char* ct_level_label(int level) {
  if (level < CT_LEVEL_MIN || level > CT_LEVEL_MAX) return nullptr;
  return label(static_cast<TrustLevel>(level)).data();
}

const char* ct_path_name(ct_path path) {
  switch (path) {
    case CT_PATH_DIRECT: return "direct";
    case CT_PATH_RECOMMENDED: return "recommended";
    case CT_PATH_IGNORANCE: return "ignorance";
  }
  return nullptr;
}

ct_status ct_format_decimal(double value, char* buf, size_t capacity) {
  CT_REQUIRE(buf != nullptr, "null buffer");
  return guarded([&] {
    const std::string text = format_decimal(value);
    if (text.size() + 1 > capacity)
      return fail(CT_ERR_INVALID_ARGUMENT, "buffer too small for rendered value");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return CT_OK;
  });
}

ct_status ct_graph_load_file(const char* path, ct_graph** out) {
  CT_REQUIRE(path != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ct_graph{parse_graph(read_file(path))};
    return CT_OK;
  });
}

ct_status ct_graph_parse(const char* json, size_t length, ct_graph** out) {
  CT_REQUIRE(json != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ct_graph{parse_graph(std::string_view(json, length))};
    return CT_OK;
  });
}

void ct_graph_free(ct_graph* graph) { delete graph; }

int ct_graph_has_node(const ct_graph* graph, const char* id) {
  if (graph == nullptr || id == nullptr) return 0;
  return graph->graph.has_node(id) ? 1 : 0;
}

ct_status ct_trust_query(const ct_graph* graph, const char* source, const char* target,
                         const char* service, size_t max_len, ct_trust_result* out) {
  CT_REQUIRE(graph && source && target && service && out, "null argument");
  return guarded([&] {
    const TrustGraph& g = graph->graph;
    for (const char* id : {source, target}) {
      if (!g.has_node(id))
        return fail(CT_ERR_NOT_FOUND, std::string("unknown entity '") + id + "'");
    }
    std::size_t n_direct = 0;
    std::size_t n_recommended = 0;
    std::optional<TrustDegree> direct;
    std::optional<TrustDegree> recommended;
    if (const GraphEdge* edge = g.find_edge(source, target, service)) {
      n_direct = 1;
      direct = edge->direct_trust;
    } else if (auto rec = evaluate_recommendation(g, source, target, service, max_len)) {
      n_recommended = rec->chain_count;
      recommended = rec->trust;
    }
    const TrustDegree td = resolve_trust_degree(n_direct, n_recommended, direct, recommended);
    out->td = td.value();
    out->level = static_cast<int>(classify_level(td));
    out->path = direct ? CT_PATH_DIRECT : recommended ? CT_PATH_RECOMMENDED : CT_PATH_IGNORANCE;
    out->chain_count = n_recommended;
    return CT_OK;
  });
}

ct_status ct_chains_discover(const ct_graph* graph, const char* source, const char* target,
                             const char* service, size_t max_len, ct_chain_list** out) {
  CT_REQUIRE(graph && source && target && service && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    for (const char* id : {source, target}) {
      if (!graph->graph.has_node(id))
        return fail(CT_ERR_NOT_FOUND, std::string("unknown entity '") + id + "'");
    }
    auto list = std::make_unique<ct_chain_list>();
    for (const TrustChain& chain :
         discover_chains(graph->graph, source, target, service, max_len)) {
      const double total = chain.total_weight();
      const double trust =
          total > 0.0 ? chain_trust(chain).value() : std::numeric_limits<double>::quiet_NaN();
      list->items.push_back({join_nodes(chain.nodes()), total, trust});
    }
    *out = list.release();
    return CT_OK;
  });
}

size_t ct_chain_list_size(const ct_chain_list* list) {
  return list == nullptr ? 0 : list->items.size();
}

ct_status ct_chain_list_get(const ct_chain_list* list, size_t index, const char** nodes,
                            double* total_weight, double* trust) {
  CT_REQUIRE(list != nullptr, "null chain list");
  if (index >= list->items.size()) return fail(CT_ERR_NOT_FOUND, "chain index out of range");
  const auto& item = list->items[index];
  if (nodes) *nodes = item.nodes.c_str();
  if (total_weight) *total_weight = item.total_weight;
  if (trust) *trust = item.trust;
  return CT_OK;
}

void ct_chain_list_free(ct_chain_list* list) { delete list; }

ct_status ct_tables_load_file(const char* path, ct_tables** out) {
  CT_REQUIRE(path != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ct_tables(restore(read_file(path)));
    return CT_OK;
  });
}

ct_status ct_tables_parse(const char* json, size_t length, ct_tables** out) {
  CT_REQUIRE(json != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ct_tables(restore(std::string_view(json, length)));
    return CT_OK;
  });
}

void ct_tables_free(ct_tables* tables) { delete tables; }

const char* ct_tables_owner(const ct_tables* tables) {
  return tables == nullptr ? nullptr : tables->tables.owner().c_str();
}

size_t ct_tables_direct_count(const ct_tables* tables) {
  return tables == nullptr ? 0 : tables->direct.size();
}

ct_status ct_tables_direct_entry(const ct_tables* tables, size_t index, ct_direct_info* out) {
  CT_REQUIRE(tables != nullptr && out != nullptr, "null argument");
  if (index >= tables->direct.size()) return fail(CT_ERR_NOT_FOUND, "entry index out of range");
  const auto& [key, entry] = *tables->direct[index];
  out->trustee = key.trustee.c_str();
  out->service = key.service.c_str();
  out->n_positive = entry.n_positive();
  out->n_total = entry.n_total();
  out->last_time = entry.last_time();
  out->mean_score = entry.mean_score();
  return CT_OK;
}

ct_status ct_tables_direct_trust(const ct_tables* tables, size_t index, double t_now,
                                 unsigned k, double tau, double bonus, double* out) {
  CT_REQUIRE(tables != nullptr && out != nullptr, "null argument");
  if (index >= tables->direct.size()) return fail(CT_ERR_NOT_FOUND, "entry index out of range");
  return guarded([&] {
    const auto& entry = tables->direct[index]->second;
    *out = direct_trust(entry.history(), t_now, DecayParams{k, tau},
                        ReputationFactor{ReputationGrade::Low, bonus})
               .value();
    return CT_OK;
  });
}

size_t ct_tables_recommended_count(const ct_tables* tables) {
  return tables == nullptr ? 0 : tables->recommended.size();
}

ct_status ct_tables_recommended_entry(const ct_tables* tables, size_t index,
                                      ct_recommended_info* out) {
  CT_REQUIRE(tables != nullptr && out != nullptr, "null argument");
  if (index >= tables->recommended.size())
    return fail(CT_ERR_NOT_FOUND, "entry index out of range");
  const auto& [service, kv] = tables->recommended[index];
  out->service = service->c_str();
  out->peer = kv->first.c_str();
  out->has_td = kv->second.td.has_value() ? 1 : 0;
  out->td = kv->second.td ? kv->second.td->value() : 0.0;
  out->updated_at = kv->second.updated_at;
  return CT_OK;
}

ct_status ct_tables_snapshot(const ct_tables* tables, char** out) {
  CT_REQUIRE(tables != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string doc = snapshot(tables->tables);
    char* buf = new char[doc.size() + 1];
    std::memcpy(buf, doc.c_str(), doc.size() + 1);
    *out = buf;
    return CT_OK;
  });
}

void ct_string_free(char* str) { delete[] str; }

ct_status ct_scenario_load_file(const char* path, ct_scenario** out) {
  CT_REQUIRE(path != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ct_scenario{parse_scenario(read_file(path))};
    return CT_OK;
  });
}

ct_status ct_scenario_parse(const char* json, size_t length, ct_scenario** out) {
  CT_REQUIRE(json != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ct_scenario{parse_scenario(std::string_view(json, length))};
    return CT_OK;
  });
}

void ct_scenario_free(ct_scenario* scenario) { delete scenario; }

void ct_scenario_set_seed(ct_scenario* scenario, uint64_t seed) {
  if (scenario) scenario->config.seed = seed;
}

void ct_scenario_set_decay_k(ct_scenario* scenario, unsigned k) {
  if (scenario) scenario->config.decay.k = k;
}

void ct_scenario_set_decay_tau(ct_scenario* scenario, double tau) {
  if (scenario) scenario->config.decay.tau = tau;
}

void ct_scenario_set_max_chain_length(ct_scenario* scenario, size_t max_len) {
  if (scenario) scenario->config.max_chain_length = max_len;
}

void ct_scenario_set_record_graphs(ct_scenario* scenario, int enabled) {
  if (scenario) scenario->config.record_graphs = enabled != 0;
}

ct_status ct_scenario_validate(const ct_scenario* scenario) {
  CT_REQUIRE(scenario != nullptr, "null scenario");
  return guarded([&] {
    scenario->config.validate();
    return CT_OK;
  });
}

ct_status ct_simulate(const ct_scenario* scenario, ct_sim_result** out) {
  CT_REQUIRE(scenario != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ct_sim_result{run(scenario->config)};
    return CT_OK;
  });
}

void ct_sim_result_free(ct_sim_result* result) { delete result; }

size_t ct_sim_trace_size(const ct_sim_result* result) {
  return result == nullptr ? 0 : result->result.trace.size();
}

ct_status ct_sim_trace_entry(const ct_sim_result* result, size_t index, ct_trace_info* out) {
  CT_REQUIRE(result != nullptr && out != nullptr, "null argument");
  if (index >= result->result.trace.size())
    return fail(CT_ERR_NOT_FOUND, "trace index out of range");
  const TraceRecord& r = result->result.trace[index];
  out->tick = r.tick;
  out->requester = r.requester.c_str();
  out->provider = r.provider.c_str();
  out->service = r.service.c_str();
  out->path = r.path == ResolutionPath::Direct        ? CT_PATH_DIRECT
              : r.path == ResolutionPath::Recommended ? CT_PATH_RECOMMENDED
                                                      : CT_PATH_IGNORANCE;
  out->td = r.td.value();
  out->level = static_cast<int>(r.level);
  out->granted = r.granted ? 1 : 0;
  out->has_score = r.score ? 1 : 0;
  out->score = r.score.value_or(0.0);
  return CT_OK;
}

ct_status ct_sim_write_trace_csv(const ct_sim_result* result, const char* path) {
  CT_REQUIRE(result != nullptr && path != nullptr, "null argument");
  return guarded([&] {
    std::ostringstream csv;
    write_trace_csv(csv, result->result.trace);
    write_file(path, csv.str());
    return CT_OK;
  });
}

ct_status ct_sim_write_outputs(const ct_sim_result* result, const char* dir) {
  CT_REQUIRE(result != nullptr && dir != nullptr, "null argument");
  return guarded([&] {
    const fs::path root(dir);
    make_directory(root);

    std::ostringstream csv;
    write_trace_csv(csv, result->result.trace);
    write_file(root / "trace.csv", csv.str());

    make_directory(root / "tables");
    for (const auto& [id, tables] : result->result.tables)
      write_file(root / "tables" / (id + ".json"), snapshot(tables));

    if (!result->result.graphs.empty()) {
      make_directory(root / "graphs");
      for (std::size_t i = 0; i < result->result.graphs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "event_%06zu.json", i);
        write_file(root / "graphs" / name, graph_to_json(result->result.graphs[i]));
      }
    }
    return CT_OK;
  });
}

}  // extern "C"
