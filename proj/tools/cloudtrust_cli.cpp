// cloudtrust command-line front end. Talks to the library exclusively through
// the C API.

#include "cloudtrust/cloudtrust.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using GraphPtr = std::unique_ptr<ct_graph, Deleter<ct_graph, ct_graph_free>>;
using ChainsPtr = std::unique_ptr<ct_chain_list, Deleter<ct_chain_list, ct_chain_list_free>>;
using TablesPtr = std::unique_ptr<ct_tables, Deleter<ct_tables, ct_tables_free>>;
using ScenarioPtr = std::unique_ptr<ct_scenario, Deleter<ct_scenario, ct_scenario_free>>;
using ResultPtr = std::unique_ptr<ct_sim_result, Deleter<ct_sim_result, ct_sim_result_free>>;

int report(ct_status status, const std::string& context) {
  std::cerr << "cloudtrust: " << context << ": " << ct_status_string(status);
  if (*ct_last_error() != '\0') std::cerr << ": " << ct_last_error();
  std::cerr << '\n';
  return status == CT_ERR_IO ? kExitIo : kExitConfig;
}

std::string render(double value) {
  if (std::isnan(value)) return "undefined";
  char buf[64];
  if (ct_format_decimal(value, buf, sizeof buf) != CT_OK) return "undefined";
  return buf;
}

struct RunOptions {
  std::string config;
  std::string out = "cloudtrust-out";
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::optional<unsigned> k;
  std::optional<std::size_t> max_len;
  bool graphs = false;
};

int cmd_run(const RunOptions& opt) {
  ct_scenario* raw = nullptr;
  if (ct_status s = ct_scenario_load_file(opt.config.c_str(), &raw); s != CT_OK)
    return report(s, "loading scenario '" + opt.config + "'");
  ScenarioPtr scenario(raw);

  if (opt.seed) ct_scenario_set_seed(scenario.get(), *opt.seed);
  if (opt.tau) ct_scenario_set_decay_tau(scenario.get(), *opt.tau);
  if (opt.k) ct_scenario_set_decay_k(scenario.get(), *opt.k);
  if (opt.max_len) ct_scenario_set_max_chain_length(scenario.get(), *opt.max_len);
  if (opt.graphs) ct_scenario_set_record_graphs(scenario.get(), 1);
  if (ct_status s = ct_scenario_validate(scenario.get()); s != CT_OK)
    return report(s == CT_ERR_IO ? CT_ERR_INVALID_ARGUMENT : s, "invalid scenario");

  ct_sim_result* raw_result = nullptr;
  if (ct_status s = ct_simulate(scenario.get(), &raw_result); s != CT_OK)
    return report(s == CT_ERR_IO ? CT_ERR_INTERNAL : s, "simulation failed");
  ResultPtr result(raw_result);

  if (ct_status s = ct_sim_write_outputs(result.get(), opt.out.c_str()); s != CT_OK)
    return report(CT_ERR_IO, "writing outputs to '" + opt.out + "'");

  const std::size_t n = ct_sim_trace_size(result.get());
  std::size_t granted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ct_trace_info info{};
    if (ct_sim_trace_entry(result.get(), i, &info) == CT_OK && info.granted) ++granted;
  }
  std::cout << "requests=" << n << " granted=" << granted << " denied=" << (n - granted)
            << " out=" << opt.out << '\n';
  return kExitOk;
}

struct QueryOptions {
  std::string graph;
  std::string source;
  std::string target;
  std::string service;
  std::size_t max_len = 4;
};

int load_graph(const std::string& path, GraphPtr& out) {
  ct_graph* raw = nullptr;
  if (ct_status s = ct_graph_load_file(path.c_str(), &raw); s != CT_OK)
    return report(s, "loading graph '" + path + "'");
  out.reset(raw);
  return kExitOk;
}

int cmd_trust(const QueryOptions& opt) {
  GraphPtr graph;
  if (int rc = load_graph(opt.graph, graph); rc != kExitOk) return rc;

  ct_trust_result result{};
  if (ct_status s = ct_trust_query(graph.get(), opt.source.c_str(), opt.target.c_str(),
                                   opt.service.c_str(), opt.max_len, &result);
      s != CT_OK) {
    return report(s == CT_ERR_IO ? CT_ERR_INTERNAL : s, "trust query");
  }
  std::cout << "td=" << render(result.td) << " level=" << ct_level_roman(result.level)
            << " path=" << ct_path_name(result.path) << '\n';
  return kExitOk;
}

int cmd_chains(const QueryOptions& opt) {
  GraphPtr graph;
  if (int rc = load_graph(opt.graph, graph); rc != kExitOk) return rc;

  ct_chain_list* raw = nullptr;
  if (ct_status s = ct_chains_discover(graph.get(), opt.source.c_str(), opt.target.c_str(),
                                       opt.service.c_str(), opt.max_len, &raw);
      s != CT_OK) {
    return report(s == CT_ERR_IO ? CT_ERR_INTERNAL : s, "chain discovery");
  }
  ChainsPtr chains(raw);
  for (std::size_t i = 0; i < ct_chain_list_size(chains.get()); ++i) {
    const char* nodes = nullptr;
    double weight = 0.0;
    double trust = 0.0;
    ct_chain_list_get(chains.get(), i, &nodes, &weight, &trust);
    std::cout << nodes << " w=" << render(weight) << " rt=" << render(trust) << '\n';
  }
  return kExitOk;
}

int cmd_classify(double td) {
  int level = 0;
  if (ct_status s = ct_classify_level(td, &level); s != CT_OK) return report(s, "classify");
  std::cout << "level=" << ct_level_roman(level) << " label=\"" << ct_level_label(level)
            << "\"\n";
  return kExitOk;
}

struct InspectOptions {
  std::string snapshot;
  std::optional<double> at;
  double tau = 1.0;
  unsigned k = 1;
};

int cmd_inspect(const InspectOptions& opt) {
  ct_tables* raw = nullptr;
  if (ct_status s = ct_tables_load_file(opt.snapshot.c_str(), &raw); s != CT_OK)
    return report(s, "loading snapshot '" + opt.snapshot + "'");
  TablesPtr tables(raw);

  std::cout << "owner=" << ct_tables_owner(tables.get()) << '\n';
  for (std::size_t i = 0; i < ct_tables_direct_count(tables.get()); ++i) {
    ct_direct_info info{};
    ct_tables_direct_entry(tables.get(), i, &info);
    std::cout << "direct trustee=" << info.trustee << " service=" << info.service
              << " n_p=" << info.n_positive << " n=" << info.n_total
              << " last_t=" << render(info.last_time) << " sl=" << render(info.mean_score);
    double dt = 0.0;
    if (ct_status s = ct_tables_direct_trust(tables.get(), i, opt.at.value_or(info.last_time),
                                             opt.k, opt.tau, 0.0, &dt);
        s != CT_OK) {
      std::cout << '\n';
      return report(s, "direct trust");
    }
    std::cout << " dt=" << render(dt) << '\n';
  }
  for (std::size_t i = 0; i < ct_tables_recommended_count(tables.get()); ++i) {
    ct_recommended_info info{};
    ct_tables_recommended_entry(tables.get(), i, &info);
    std::cout << "recommended service=" << info.service << " peer=" << info.peer
              << " td=" << (info.has_td ? render(info.td) : std::string("none"))
              << " updated_at=" << render(info.updated_at) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust evaluation and trust-gated file-sharing simulation"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run a scenario, writing the trace and table snapshots");
  run->add_option("config", run_opt.config, "Scenario JSON file")->required();
  run->add_option("--out", run_opt.out, "Output directory")->capture_default_str();
  run->add_option("--seed", run_opt.seed, "Override the scenario seed");
  run->add_option("--tau", run_opt.tau, "Override the decay time scale");
  run->add_option("--k", run_opt.k, "Override the decay exponent");
  run->add_option("--max-len", run_opt.max_len, "Override the maximum chain length");
  run->add_flag("--graphs", run_opt.graphs, "Also write the trust graph behind every request");

  QueryOptions trust_opt;
  auto* trust = app.add_subcommand("trust", "Resolve the trust one entity places in another");
  trust->add_option("graph", trust_opt.graph, "Graph fixture JSON file")->required();
  trust->add_option("source", trust_opt.source, "Trustor id")->required();
  trust->add_option("target", trust_opt.target, "Trustee id")->required();
  trust->add_option("service", trust_opt.service, "Service id")->required();
  trust->add_option("--max-len", trust_opt.max_len, "Maximum chain length")
      ->check(CLI::Range(2, 8))
      ->capture_default_str();

  QueryOptions chains_opt;
  auto* chains = app.add_subcommand("chains", "List the trust chains between two entities");
  chains->add_option("graph", chains_opt.graph, "Graph fixture JSON file")->required();
  chains->add_option("source", chains_opt.source, "Trustor id")->required();
  chains->add_option("target", chains_opt.target, "Trustee id")->required();
  chains->add_option("service", chains_opt.service, "Service id")->required();
  chains->add_option("--max-len", chains_opt.max_len, "Maximum chain length")
      ->check(CLI::Range(2, 8))
      ->capture_default_str();

  double classify_td = 0.0;
  auto* classify = app.add_subcommand("classify", "Map a trust degree onto its trust level");
  classify->add_option("td", classify_td, "Trust degree in [0, 1]")->required();

  InspectOptions inspect_opt;
  auto* inspect = app.add_subcommand("inspect", "Summarise a trust table snapshot");
  inspect->add_option("snapshot", inspect_opt.snapshot, "Snapshot JSON file")->required();
  inspect->add_option("--at", inspect_opt.at,
                      "Evaluate direct trust at this time (default: each entry's last time)");
  inspect->add_option("--tau", inspect_opt.tau, "Decay time scale")->capture_default_str();
  inspect->add_option("--k", inspect_opt.k, "Decay exponent")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(run_opt);
  if (*trust) return cmd_trust(trust_opt);
  if (*chains) return cmd_chains(chains_opt);
  if (*classify) return cmd_classify(classify_td);
  if (*inspect) return cmd_inspect(inspect_opt);
  return kExitConfig;
}
