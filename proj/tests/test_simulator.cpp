#include "cloudtrust/error.hpp"
#include "cloudtrust/simulator.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

using namespace cloudtrust;

namespace {

EntityConfig entity(const std::string& id, ReputationGrade grade = ReputationGrade::Low,
                    double quality = 0.9) {
  EntityConfig e;
  e.id = id;
  e.grade = grade;
  e.profile.quality.fill(quality);
  return e;
}

ScenarioConfig small_world() {
  ScenarioConfig c;
  c.seed = 11;
  c.entities = {entity("a"), entity("b"), entity("c"), entity("d")};
  c.services = {ServiceConfig{"fs", TrustLevel::NoOpinion, {}}};
  return c;
}

std::string csv(const SimulationResult& r) {
  std::ostringstream out;
  write_trace_csv(out, r.trace);
  return out.str();
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(CLOUDTRUST_FIXTURE_DIR) + "/" + name);
  REQUIRE(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("gate_access") {
  TEST_CASE("boundary examples") {
    CHECK(gate_access(TrustDegree(0.5), TrustLevel::MediumTrust));
    CHECK_FALSE(gate_access(TrustDegree(0.4), TrustLevel::MediumTrust));
    CHECK(gate_access(TrustDegree(1.0), TrustLevel::CompleteTrust));
    CHECK_FALSE(gate_access(TrustDegree(0.999), TrustLevel::CompleteTrust));
    CHECK(gate_access(TrustDegree(0.0), TrustLevel::NoOpinion));
    CHECK_FALSE(gate_access(TrustDegree(0.0), TrustLevel::LowDistrust));
  }

  TEST_CASE("property: granted iff level reaches the requirement") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      const TrustDegree td(i % 10 == 0 ? (i / 10) % 3 * 0.5 : unit(rng));
      for (int level = 1; level <= 5; ++level) {
        const auto required = static_cast<TrustLevel>(level);
        REQUIRE(gate_access(td, required) ==
                (static_cast<int>(classify_level(td)) >= level));
      }
    }
  }
}

TEST_SUITE("sample_sla") {
  TEST_CASE("point masses at the ends") {
    std::mt19937_64 rng(1);
    SlaProfile perfect;
    CHECK(sample_sla(perfect, rng).as_array() == std::array<double, 5>{1, 1, 1, 1, 1});
    SlaProfile broken;
    broken.quality.fill(0.0);
    CHECK(sample_sla(broken, rng).as_array() == std::array<double, 5>{0, 0, 0, 0, 0});
  }

  TEST_CASE("same engine state, same draw") {
    SlaProfile p;
    p.quality = {0.2, 0.4, 0.6, 0.8, 0.5};
    std::mt19937_64 x(42);
    std::mt19937_64 y(42);
    for (int i = 0; i < 50; ++i) {
      const auto s = sample_sla(p, x);
      REQUIRE(s == sample_sla(p, y));
      for (double v : s.as_array()) REQUIRE((v >= 0.0 && v <= 1.0));
    }
  }

  TEST_CASE("samples centre on the profile quality") {
    SlaProfile p;
    p.quality.fill(0.3);
    p.concentration = 50;
    std::mt19937_64 rng(8);
    double sum = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) sum += sample_sla(p, rng).availability;
    CHECK(sum / n == doctest::Approx(0.3).epsilon(0.02));
  }
}

TEST_SUITE("format_decimal") {
  TEST_CASE("four places, ties to even") {
    CHECK(format_decimal(0.0) == "0.0000");
    CHECK(format_decimal(2.0 / 3.0) == "0.6667");
    CHECK(format_decimal(0.72) == "0.7200");
    CHECK(format_decimal(0.03125) == "0.0312");
    CHECK(format_decimal(0.09375) == "0.0938");
    CHECK(format_decimal(1.0) == "1.0000");
  }
}

TEST_SUITE("scenario config") {
  TEST_CASE("validation rejects broken configs") {
    auto check_bad = [](auto mutate) {
      ScenarioConfig c = small_world();
      mutate(c);
      CHECK_THROWS_AS(c.validate(), Error);
    };
    check_bad([](ScenarioConfig& c) { c.entities.clear(); });
    check_bad([](ScenarioConfig& c) { c.services.clear(); });
    check_bad([](ScenarioConfig& c) { c.entities.push_back(entity("a")); });
    check_bad([](ScenarioConfig& c) { c.entities[0].id = "a b"; });
    check_bad([](ScenarioConfig& c) { c.entities[0].id = "a,b"; });
    check_bad([](ScenarioConfig& c) { c.entities[0].profile.quality[2] = 1.5; });
    check_bad([](ScenarioConfig& c) { c.services[0].providers = {"zz"}; });
    check_bad([](ScenarioConfig& c) { c.schedule.push_back({0, "nobody", "fs", {}}); });
    check_bad([](ScenarioConfig& c) { c.schedule.push_back({0, "a", "nothing", {}}); });
    check_bad([](ScenarioConfig& c) { c.schedule.push_back({0, "a", "fs", "a"}); });
    check_bad([](ScenarioConfig& c) { c.decay.k = 0; });
    check_bad([](ScenarioConfig& c) { c.decay.tau = -1; });
    check_bad([](ScenarioConfig& c) { c.reputation.high = 0.2; });
    check_bad([](ScenarioConfig& c) { c.sla_weights.values[0] = 0.5; });
    check_bad([](ScenarioConfig& c) { c.max_chain_length = 1; });
    check_bad([](ScenarioConfig& c) { c.max_chain_length = 9; });
    check_bad([](ScenarioConfig& c) { c.arrivals = ArrivalProcess{10, -1.0}; });
    check_bad([](ScenarioConfig& c) {
      c.schedule.push_back({2, "a", "fs", "b"});
      c.history.push_back({"a", "b", "fs", {5, 0.5, true}});
    });
    CHECK_NOTHROW(small_world().validate());
  }

  TEST_CASE("parsing") {
    const ScenarioConfig c = parse_scenario(read_fixture("file_sharing.json"));
    CHECK_NOTHROW(c.validate());
    CHECK(c.entities.size() == 5);
    CHECK(c.services.size() == 2);
    CHECK(c.find_service("secure-storage")->required == TrustLevel::MediumTrust);

    CHECK_THROWS_AS(parse_scenario(read_fixture("malformed_scenario.json")), ParseError);
    CHECK_THROWS_AS(parse_scenario(R"({"entities": []})"), ParseError);
    CHECK_THROWS_AS(parse_scenario(R"({"entities": [{"id": "a", "reputation": "Great"}],
                                        "services": [{"id": "fs"}]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_scenario(R"({"entities": [{"id": "a"}],
                                        "services": [{"id": "fs", "required_level": "VI"}]})"),
                    ParseError);
    const ScenarioConfig minimal =
        parse_scenario(R"({"entities": [{"id": "a", "sla": 0.5}], "services": [{"id": "fs",
                           "required_level": 3}], "sla_weights": [0.1, 0.2, 0.3, 0.2, 0.2]})");
    CHECK(minimal.entities[0].profile.quality[4] == 0.5);
    CHECK(minimal.services[0].required == TrustLevel::MediumTrust);
    CHECK(minimal.sla_weights.values[2] == 0.3);
  }
}

TEST_SUITE("simulation") {
  TEST_CASE("a fresh request falls back to ignorance") {
    ScenarioConfig c = small_world();
    c.services.push_back(ServiceConfig{"vault", TrustLevel::LowDistrust, {}});
    c.schedule = {{0, "a", "fs", "b"}, {0, "c", "vault", "d"}};
    const auto r = run(c);
    REQUIRE(r.trace.size() == 2);
    for (const auto& t : r.trace) {
      CHECK(t.path == ResolutionPath::Ignorance);
      CHECK(t.td.value() == 0.0);
      CHECK(t.level == TrustLevel::NoOpinion);
    }
    CHECK(r.trace[0].granted);
    CHECK_FALSE(r.trace[1].granted);
    CHECK_FALSE(r.trace[1].score.has_value());
    CHECK(r.tables.at("c").direct.empty());
  }

  TEST_CASE("direct path agrees with the reference formula") {
    ScenarioConfig c = small_world();
    c.entities[1] = entity("b", ReputationGrade::Medium, 0.7);
    c.decay = DecayParams{2, 3.0};
    c.schedule = {{0, "a", "fs", "b"}, {2, "a", "fs", "b"}, {3, "a", "fs", "b"},
                  {7, "a", "fs", "b"}};
    const auto r = run(c);
    REQUIRE(r.trace.size() == 4);
    std::vector<oracle::Interaction> seen;
    for (const auto& t : r.trace) {
      if (seen.empty()) {
        CHECK(t.path == ResolutionPath::Ignorance);
      } else {
        REQUIRE(t.path == ResolutionPath::Direct);
        const auto want = oracle::direct_trust(seen, double(t.tick), 2, 3.0, 0.05);
        CHECK(t.td.value() == doctest::Approx(double(want)).epsilon(1e-12));
      }
      REQUIRE(t.score.has_value());
      CHECK(*t.score == doctest::Approx(satisfaction_level(*t.sla, c.sla_weights)));
      seen.push_back({double(t.tick), *t.score});
    }
  }

  TEST_CASE("recommended path matches chain evaluation on the recorded graph") {
    ScenarioConfig c = small_world();
    c.record_graphs = true;
    c.schedule = {{0, "a", "fs", "b"}, {1, "b", "fs", "c"}, {2, "a", "fs", "c"}};
    const auto r = run(c);
    REQUIRE(r.trace.size() == 3);
    const auto& t = r.trace[2];
    REQUIRE(t.path == ResolutionPath::Recommended);
    const auto rec = evaluate_recommendation(r.graphs[2], "a", "c", "fs");
    REQUIRE(rec.has_value());
    CHECK(rec->trust == t.td);
    // The recommended list now carries the value it just learned.
    CHECK(r.tables.at("a").recommended.peers("fs")->at("c").td == t.td);
  }

  TEST_CASE("broadcast reaches peers outside the list") {
    ScenarioConfig c = small_world();
    c.bootstrap_recommended = false;
    c.schedule = {{0, "a", "fs", "b"}, {1, "b", "fs", "c"}, {2, "a", "fs", "c"}};
    const auto r = run(c);
    const auto& t = r.trace[2];
    CHECK(t.path == ResolutionPath::Recommended);
    CHECK(t.broadcast);
    CHECK(r.tables.at("a").recommended.peers("fs")->contains("b"));
  }

  TEST_CASE("determinism: same seed, same trace") {
    ScenarioConfig c = small_world();
    c.arrivals = ArrivalProcess{200, 0.8};
    const std::string first = csv(run(c));
    CHECK(first == csv(run(c)));
    c.seed = 12;
    CHECK(first != csv(run(c)));
  }

  TEST_CASE("property: protocol order and conservation") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
      ScenarioConfig c = small_world();
      c.seed = rng();
      c.record_graphs = true;
      c.arrivals = ArrivalProcess{150, 0.7};
      c.services.push_back(ServiceConfig{"vault", TrustLevel::LowDistrust, {"c", "d"}});
      const auto r = run(c);
      REQUIRE(r.graphs.size() == r.trace.size());

      std::set<std::tuple<EntityId, EntityId, ServiceId>> known;
      std::size_t granted = 0;
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const auto& t = r.trace[i];
        const bool has_direct = known.contains({t.requester, t.provider, t.service});
        REQUIRE((t.path == ResolutionPath::Direct) == has_direct);
        if (t.path == ResolutionPath::Ignorance) {
          REQUIRE_FALSE(evaluate_recommendation(r.graphs[i], t.requester, t.provider, t.service)
                            .has_value());
          REQUIRE(t.td.value() == 0.0);
        }
        REQUIRE(t.granted == gate_access(t.td, c.find_service(t.service)->required));
        REQUIRE(t.granted == t.score.has_value());
        if (t.granted) {
          known.insert({t.requester, t.provider, t.service});
          ++granted;
        }
      }
      std::size_t recorded = 0;
      for (const auto& [id, tables] : r.tables)
        for (const auto& [key, entry] : tables.direct.entries()) recorded += entry.n_total();
      REQUIRE(recorded == granted);
    }
  }

  TEST_CASE("decay realism: fading history never gains trust") {
    // Interactions with non-increasing scores, evaluated later and later.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      DirectTrustTable table("i");
      double score = unit(rng);
      double t = 0.0;
      for (int j = 0; j < 1 + i % 6; ++j) {
        table.record_interaction("j", "fs", {t, score, score >= 0.5});
        score *= unit(rng);
        t += 0.5 + 2.0 * unit(rng);
      }
      const DecayParams params{1u + static_cast<unsigned>(i % 3), 1.0 + 4.0 * unit(rng)};
      const ReputationFactor none{ReputationGrade::Low, 0.0};
      double previous = 2.0;
      for (double now = t; now < t + 30; now += 0.75) {
        const double td = table.lookup_direct("j", "fs", now, params, none)->value();
        REQUIRE(td <= previous + 1e-12);
        previous = td;
      }
    }
  }

  TEST_CASE("reputation: a high grade earns more trust for the same service") {
    ScenarioConfig c = small_world();
    c.entities[1] = entity("b", ReputationGrade::High, 0.6);
    c.entities[2] = entity("c", ReputationGrade::Low, 0.6);
    c.entities[1].profile.quality.fill(0.6);
    c.history = {{"a", "b", "fs", {0, 0.6, true}}, {"a", "c", "fs", {0, 0.6, true}}};
    c.schedule = {{1, "a", "fs", "b"}, {1, "a", "fs", "c"}};
    const auto r = run(c);
    REQUIRE(r.trace[0].path == ResolutionPath::Direct);
    REQUIRE(r.trace[1].path == ResolutionPath::Direct);
    CHECK(r.trace[0].td.value() - r.trace[1].td.value() == doctest::Approx(0.10));
  }

  TEST_CASE("provider choice prefers the most trusted, then the smallest id") {
    ScenarioConfig c = small_world();
    c.history = {{"a", "c", "fs", {0, 0.8, true}}, {"a", "d", "fs", {0, 0.8, true}}};
    c.schedule = {{1, "a", "fs", {}}};
    auto r = run(c);
    CHECK(r.trace[0].provider == "c");
    c.history[1].record.score = 0.9;
    r = run(c);
    CHECK(r.trace[0].provider == "d");
  }

  TEST_CASE("requests without any other provider are skipped") {
    ScenarioConfig c = small_world();
    c.services[0].providers = {"a"};
    c.schedule = {{0, "a", "fs", {}}, {0, "b", "fs", {}}};
    const auto r = run(c);
    CHECK(r.skipped == 1);
    CHECK(r.trace.size() == 1);
  }

  TEST_CASE("trace csv") {
    ScenarioConfig c = small_world();
    c.services.push_back(ServiceConfig{"vault", TrustLevel::CompleteTrust, {}});
    c.schedule = {{0, "a", "vault", "b"}};
    const std::string out = csv(run(c));
    CHECK(out == std::string(kTraceHeader) + "\n0,a,b,vault,ignorance,0.0000,I,denied,\n");
  }
}
