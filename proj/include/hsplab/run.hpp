#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hsplab/hsplab.hpp"

// One solve from files to a JSON report, and suites of them. Shared by the
// command line tool and the acceptance binary.

namespace hsplab {

inline constexpr const char* kReportSchema = "hsplab.report/1";
inline constexpr const char* kSuiteSchema = "hsplab.suite/1";

enum ExitCode : int { kExitOk = 0, kExitSolverError = 1, kExitMismatch = 2, kExitSpecError = 3 };

struct RunConfig {
  std::string instance;
  std::string group_path;
  std::string hidden;  // elements separated by ';', or @path with one per line
  std::string solver = "auto";
  double epsilon = 1.0 / 1024;
  std::uint64_t seed = 1;
  bool verify = false;
};

/// Limits for --solver auto. Overridable with HSPLAB_AUTO_MAX_COMMUTATOR and
/// HSPLAB_AUTO_MAX_QUOTIENT.
struct AutoThresholds {
  std::size_t max_commutator = 64;
  std::size_t max_quotient = 256;

  static AutoThresholds from_env() {
    AutoThresholds t;
    auto read = [](const char* name, std::size_t& out) {
      if (const char* v = std::getenv(name)) {
        char* end = nullptr;
        const auto x = std::strtoull(v, &end, 10);
        if (end != v && x > 0) out = static_cast<std::size_t>(x);
      }
    };
    read("HSPLAB_AUTO_MAX_COMMUTATOR", t.max_commutator);
    read("HSPLAB_AUTO_MAX_QUOTIENT", t.max_quotient);
    return t;
  }
};

struct RunOutcome {
  nlohmann::ordered_json report;
  int exit_code = kExitOk;
};

namespace detail {

inline std::vector<std::string> hidden_texts(const std::string& spec) {
  std::vector<std::string> out;
  auto keep = [&out](std::string_view s) {
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (!s.empty()) out.emplace_back(s);
  };
  if (spec.starts_with("@")) {
    std::ifstream in(spec.substr(1));
    if (!in) fail(ErrorCode::BadSpec, "cannot open hidden-subgroup file " + spec.substr(1));
    for (std::string line; std::getline(in, line);) keep(line);
    return out;
  }
  std::size_t start = 0;
  for (;;) {
    const auto semi = spec.find(';', start);
    keep(std::string_view(spec).substr(start, semi == std::string::npos ? std::string::npos : semi - start));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

/// Number of cosets of <N_gens>, or limit + 1 if there are more.
inline std::size_t count_cosets(const BlackBoxGroup& G, std::span<const Element> N_gens, std::size_t limit,
                                std::size_t bound) {
  CosetLabeler labels(G, N_gens, bound);
  std::set<Label> seen{labels.peek(G.identity())};
  std::vector<Element> queue{G.identity()};
  for (std::size_t i = 0; i < queue.size() && seen.size() <= limit; ++i) {
    for (const auto& s : G.generators()) {
      const Element y = G.multiply(queue[i], s);
      if (seen.insert(labels.peek(y)).second) queue.push_back(y);
    }
  }
  return seen.size();
}

inline std::string choose_solver(const BlackBoxGroup& G, const AutoThresholds& t, std::size_t bound) {
  if (is_abelian(G, G.generators())) return "abelian";
  const auto& S = G.generators();
  std::vector<Element> seeds;
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t j = i + 1; j < S.size(); ++j) seeds.push_back(G.commutator(S[i], S[j]));
  }
  try {
    normal_closure(G, seeds, t.max_commutator);
    return "commutator";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BoundExceeded) throw;
  }
  const auto& N = G.declared_normal();
  if (!N.empty()) {
    try {
      hsplab::detail::checked_elem2_normal(G, N, bound);
      return count_cosets(G, N, t.max_quotient, bound) <= t.max_quotient ? "elem2-small" : "elem2-cyclic";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotElementaryAbelian2 && e.code() != ErrorCode::NotNormal) throw;
    }
  }
  fail(ErrorCode::UnsupportedInstance, "no solver applies: G' is large and no elementary Abelian 2 normal subgroup is declared");
}

inline nlohmann::ordered_json hex_list(std::span<const Element> xs) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& x : xs) out.push_back(x.to_hex());
  return out;
}

inline nlohmann::ordered_json text_list(const BlackBoxGroup& G, std::span<const Element> xs) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& x : xs) out.push_back(G.format(x));
  return out;
}

inline bool is_spec_error(ErrorCode c) { return c == ErrorCode::BadSpec || c == ErrorCode::InvalidEncoding; }

}  // namespace detail

/// Loads the group, hides <hidden>, runs the solver and optionally checks
/// the answer against brute force. Never throws; failures land in the report.
inline RunOutcome run(const RunConfig& cfg, const AutoThresholds& thresholds = AutoThresholds::from_env()) {
  using nlohmann::ordered_json;
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  ordered_json& r = out.report;
  r["schema"] = kReportSchema;
  r["instance"] = cfg.instance;
  r["group_file"] = cfg.group_path;
  r["config"] = {{"solver", cfg.solver}, {"epsilon", cfg.epsilon}, {"seed", cfg.seed}, {"verify", cfg.verify}};
  r["status"] = "ok";

  auto finish = [&]() {
    r["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  };
  auto error = [&](int code, std::string_view name, const std::string& message) {
    r["status"] = "error";
    r["error"] = {{"code", name}, {"message", message}};
    out.exit_code = code;
    return finish();
  };

  if (!(cfg.epsilon > 0 && cfg.epsilon < 0.5)) return error(kExitSpecError, "BadSpec", "epsilon must lie in (0, 1/2)");

  std::optional<BlackBoxGroup> G;
  std::vector<Element> H;
  try {
    G.emplace(make_group(load_group_spec(cfg.group_path)));
    for (const auto& text : detail::hidden_texts(cfg.hidden)) H.push_back(G->parse(text));
  } catch (const Error& e) {
    return error(detail::is_spec_error(e.code()) ? kExitSpecError : kExitSolverError, to_string(e.code()), e.what());
  }
  r["group"] = {{"name", G->name()}, {"kind", std::string(G->backend().kind())}, {"encoding_length", G->encoding_length()}};
  r["hidden"] = detail::hex_list(H);

  SolverConfig sc;
  sc.epsilon = cfg.epsilon;
  sc.seed = cfg.seed;
  Simulator sim(sc);
  try {
    HidingOracle f(*G, H, derive_seed(cfg.seed, 0), true, sc.enum_bound);
    const std::string method = cfg.solver == "auto" ? detail::choose_solver(*G, thresholds, sc.enum_bound) : cfg.solver;
    SubgroupResult res;
    if (method == "abelian") {
      res = solve_abelian(*G, f, sim);
    } else if (method == "commutator") {
      res = solve_small_commutator(*G, f, sim);
    } else if (method == "elem2-small") {
      res = solve_elem2_small_quotient(*G, G->declared_normal(), f, sim);
    } else if (method == "elem2-cyclic") {
      res = solve_elem2_cyclic(*G, G->declared_normal(), f, sim);
    } else if (method == "normal") {
      const QueryStats start = detail::snapshot(*G, f, sim);
      res.method = "normal";
      res.gens = detail::prune_generators(*G, hidden_normal_subgroup(*G, f, sim).gens, sc.enum_bound);
      res.stats = detail::snapshot(*G, f, sim) - start;
    } else {
      return error(kExitSpecError, "BadSpec", "unknown solver " + cfg.solver);
    }

    r["method"] = res.method;
    r["generators"] = detail::hex_list(res.gens);
    r["generators_text"] = detail::text_list(*G, res.gens);
    try {
      r["result_order"] = closure_set(*G, res.gens, sc.enum_bound).size();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundExceeded) throw;
      r["result_order"] = nullptr;
    }
    r["stats"] = {{"f_queries", res.stats.f_queries},
                  {"group_ops", res.stats.group_ops},
                  {"rng_draws", res.stats.rng_draws},
                  {"simulator_evaluations", res.stats.sim_queries},
                  {"fourier_samples", sim.samples_drawn()}};
    const auto& d = res.diagnostics;
    r["diagnostics"] = {{"commutator_order", d.commutator_order},
                        {"normal_order", d.normal_order},
                        {"quotient_order", d.quotient_order},
                        {"coset_representatives", d.V.size()},
                        {"intersection", detail::hex_list(d.intersection)},
                        {"picks", detail::hex_list(d.picks)},
                        {"query_budget", d.query_budget}};

    if (cfg.verify) {
      const auto elems = enumerate_closure(*G, G->generators(), sc.enum_bound);
      const VerificationReport v = verify_result(*G, elems, f, res.gens, cfg.instance);
      r["verification"] = {{"expected_order", v.expected_order}, {"result_order", v.result_order}, {"equal", v.equal}};
      if (!v.equal) out.exit_code = kExitMismatch;
    } else {
      r["verification"] = nullptr;
    }
  } catch (const Error& e) {
    return error(detail::is_spec_error(e.code()) ? kExitSpecError : kExitSolverError, to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error(kExitSolverError, "InternalError", e.what());
  }
  return finish();
}

/// Suite file: {"instances": [{"name", "group", "hidden", "solver",
/// "epsilon", "verify"}, ...]}. Paths are relative to the suite file.
/// Instance i runs with seed derive_seed(master_seed, i); reports keep the
/// file order whatever the thread count.
inline RunOutcome run_suite(const std::string& suite_path, std::uint64_t master_seed, double default_epsilon,
                            bool default_verify, unsigned threads = std::thread::hardware_concurrency()) {
  using nlohmann::ordered_json;
  RunOutcome out;
  ordered_json& r = out.report;
  r["schema"] = kSuiteSchema;
  r["suite_file"] = suite_path;
  r["master_seed"] = master_seed;

  std::vector<RunConfig> configs;
  try {
    std::ifstream in(suite_path);
    if (!in) fail(ErrorCode::BadSpec, "cannot open suite file " + suite_path);
    const auto doc = nlohmann::json::parse(in);
    const auto base = std::filesystem::path(suite_path).parent_path();
    std::size_t i = 0;
    for (const auto& inst : doc.at("instances")) {
      RunConfig c;
      c.instance = inst.value("name", "instance-" + std::to_string(i));
      c.group_path = (base / inst.at("group").get<std::string>()).string();
      c.hidden = inst.value("hidden", "");
      if (c.hidden.starts_with("@")) c.hidden = "@" + (base / c.hidden.substr(1)).string();
      c.solver = inst.value("solver", "auto");
      c.epsilon = inst.value("epsilon", default_epsilon);
      c.verify = inst.value("verify", default_verify);
      c.seed = derive_seed(master_seed, i++);
      configs.push_back(std::move(c));
    }
  } catch (const Error& e) {
    r["status"] = "error";
    r["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    out.exit_code = kExitSpecError;
    return out;
  } catch (const nlohmann::json::exception& e) {
    r["status"] = "error";
    r["error"] = {{"code", "BadSpec"}, {"message", e.what()}};
    out.exit_code = kExitSpecError;
    return out;
  }

  const AutoThresholds thresholds = AutoThresholds::from_env();
  std::vector<RunOutcome> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) results[i] = run(configs[i], thresholds);
  };
  std::vector<std::thread> pool;
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::size_t ok = 0, mismatch = 0, errors = 0;
  int worst = kExitOk;
  auto severity = [](int code) { return code == kExitSpecError ? 3 : code == kExitMismatch ? 2 : code == kExitSolverError ? 1 : 0; };
  r["instances"] = ordered_json::array();
  for (auto& res : results) {
    if (res.exit_code == kExitOk) ++ok;
    if (res.exit_code == kExitMismatch) ++mismatch;
    if (res.exit_code == kExitSolverError || res.exit_code == kExitSpecError) ++errors;
    if (severity(res.exit_code) > severity(worst)) worst = res.exit_code;
    r["instances"].push_back(std::move(res.report));
  }
  r["summary"] = {{"total", results.size()}, {"ok", ok}, {"mismatch", mismatch}, {"errors", errors}};
  r["status"] = worst == kExitOk ? "ok" : "failed";
  out.exit_code = worst;
  return out;
}

/// Report with every wall-clock field removed, for determinism checks.
inline nlohmann::ordered_json strip_timing(nlohmann::ordered_json j) {
  if (j.is_object()) {
    j.erase("wall_seconds");
    for (auto& [k, v] : j.items()) v = strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timing(v);
  }
  return j;
}

}  // namespace hsplab
