#include "moqd/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <locale>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"

namespace moqd::cli {
namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "algorithm", "domain",  "objectives", "dimension",  "iterations", "emitters", "batch",
      "cells",     "cvt_samples", "alpha",  "epsilon",    "sigma0",     "size_limit", "restart",
      "selection", "sigma_iso", "sigma_line", "x0",       "seed"};
  return keys;
}

std::size_t get_count(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw UsageError(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw UsageError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::string get_text(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_string()) throw UsageError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

void prepare(std::ostream& out) {
  out.imbue(std::locale::classic());
  out << std::setprecision(17);
}

}  // namespace

json to_json(const RunConfig& config) {
  return json{
      {"algorithm", to_string(config.algorithm)},
      {"domain", to_string(config.domain.kind)},
      {"objectives", config.domain.objectives()},
      {"dimension", config.domain.dimension},
      {"iterations", config.iterations},
      {"emitters", config.emitters},
      {"batch", config.batch},
      {"cells", config.cells},
      {"cvt_samples", config.cvt_samples},
      {"alpha", config.alpha},
      {"epsilon", config.epsilon},
      {"sigma0", config.sigma0},
      {"size_limit", config.size_limit.value_or(0)},
      {"restart", to_string(config.restart)},
      {"selection", to_string(config.selection)},
      {"sigma_iso", config.sigma_iso},
      {"sigma_line", config.sigma_line},
      {"x0", config.x0},
      {"seed", config.seed},
  };
}

RunConfig apply_json(const json& doc, RunConfig base) {
  if (!doc.is_object()) throw UsageError("configuration must be a JSON object");
  for (const auto& item : doc.items()) {
    if (!known_keys().contains(item.key())) throw UsageError("unknown configuration key '" + item.key() + "'");
  }
  try {
    if (doc.contains("algorithm")) base.algorithm = parse_algorithm(get_text(doc, "algorithm"));
    if (doc.contains("domain") || doc.contains("objectives") || doc.contains("dimension")) {
      const DomainKind kind = doc.contains("domain") ? parse_domain_kind(get_text(doc, "domain")) : base.domain.kind;
      const std::size_t k = doc.contains("objectives") ? get_count(doc, "objectives") : base.domain.objectives();
      const std::size_t n = doc.contains("dimension") ? get_count(doc, "dimension") : base.domain.dimension;
      if (kind == DomainKind::arm && k == 3) throw UsageError("three objectives are only available for sphere and rastrigin");
      base.domain = DomainSpec::make(kind, n, k);
    }
    if (doc.contains("iterations")) base.iterations = get_count(doc, "iterations");
    if (doc.contains("emitters")) base.emitters = get_count(doc, "emitters");
    if (doc.contains("batch")) base.batch = get_count(doc, "batch");
    if (doc.contains("cells")) base.cells = get_count(doc, "cells");
    if (doc.contains("cvt_samples")) base.cvt_samples = get_count(doc, "cvt_samples");
    if (doc.contains("alpha")) base.alpha = get_real(doc, "alpha");
    if (doc.contains("epsilon")) base.epsilon = get_real(doc, "epsilon");
    if (doc.contains("sigma0")) base.sigma0 = get_real(doc, "sigma0");
    if (doc.contains("size_limit")) {
      if (doc.at("size_limit").is_null()) {
        base.size_limit.reset();
      } else {
        const std::size_t limit = get_count(doc, "size_limit");
        base.size_limit = limit == 0 ? std::nullopt : std::optional<std::size_t>(limit);
      }
    }
    if (doc.contains("restart")) base.restart = parse_restart_rule(get_text(doc, "restart"));
    if (doc.contains("selection")) base.selection = parse_selection(get_text(doc, "selection"));
    if (doc.contains("sigma_iso")) base.sigma_iso = get_real(doc, "sigma_iso");
    if (doc.contains("sigma_line")) base.sigma_line = get_real(doc, "sigma_line");
    if (doc.contains("x0")) {
      if (!doc.at("x0").is_array()) throw UsageError("'x0' must be an array of numbers");
      base.x0 = doc.at("x0").get<std::vector<double>>();
    }
    if (doc.contains("seed")) {
      if (!doc.at("seed").is_number_unsigned()) throw UsageError("'seed' must be a non-negative integer");
      base.seed = doc.at("seed").get<std::uint64_t>();
    }
  } catch (const UsageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed configuration: ") + e.what());
  }
  return base;
}

CliInvocation parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Run one multi-objective quality-diversity benchmark and export its results.", "moqd_bench"};

  std::string algorithm, domain, restart, selection, config_path, out_dir;
  std::size_t objectives = 0, dimension = 0, iterations = 0, emitters = 0, batch = 0, cells = 0, cvt_samples = 0,
              size_limit = 0;
  double alpha = 0, epsilon = 0, sigma0 = 0, sigma_iso = 0, sigma_line = 0;
  std::uint64_t seed = 0;

  app.add_option("--algorithm", algorithm, "mo-cma-mae | mome | emitter-como");
  app.add_option("--domain", domain, "sphere | rastrigin | arm");
  app.add_option("--objectives", objectives, "2, or 3 for sphere/rastrigin");
  app.add_option("--iterations", iterations, "Number of iterations N");
  app.add_option("--emitters", emitters, "Number of emitters");
  app.add_option("--batch", batch, "Batch size per emitter");
  app.add_option("--cells", cells, "Number of CVT cells");
  app.add_option("--cvt-samples", cvt_samples, "Uniform samples used to fit the CVT");
  app.add_option("--alpha", alpha, "Threshold learning rate in (0, 1]");
  app.add_option("--epsilon", epsilon, "Bisection tolerance");
  app.add_option("--sigma0", sigma0, "Initial CMA-ES step size");
  app.add_option("--size-limit", size_limit, "Per-cell front limit, 0 for a dynamic archive");
  app.add_option("--restart", restart, "basic | cycle");
  app.add_option("--selection", selection, "mu | filter");
  app.add_option("--sigma-iso", sigma_iso, "Isotropic mutation scale (MOME)");
  app.add_option("--sigma-line", sigma_line, "Line mutation scale (MOME)");
  app.add_option("--dimension", dimension, "Solution dimension n");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--config", config_path, "JSON configuration file (e.g. a config.resolved)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CliInvocation invocation;
  RunConfig config;
  config.domain = DomainSpec::make(DomainKind::sphere, 100, 2);
  bool restart_given = false;

  if (app.count("--config")) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read configuration file '" + config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("configuration file '" + config_path + "' is not valid JSON: " + e.what());
    }
    restart_given = doc.is_object() && doc.contains("restart");
    config = apply_json(doc, config);
  }

  json flags = json::object();
  auto take = [&](const char* flag, const char* key, const auto& value) {
    if (app.count(flag)) flags[key] = value;
  };
  take("--algorithm", "algorithm", algorithm);
  take("--domain", "domain", domain);
  take("--objectives", "objectives", objectives);
  take("--dimension", "dimension", dimension);
  take("--iterations", "iterations", iterations);
  take("--emitters", "emitters", emitters);
  take("--batch", "batch", batch);
  take("--cells", "cells", cells);
  take("--cvt-samples", "cvt_samples", cvt_samples);
  take("--alpha", "alpha", alpha);
  take("--epsilon", "epsilon", epsilon);
  take("--sigma0", "sigma0", sigma0);
  take("--size-limit", "size_limit", size_limit);
  take("--restart", "restart", restart);
  take("--selection", "selection", selection);
  take("--sigma-iso", "sigma_iso", sigma_iso);
  take("--sigma-line", "sigma_line", sigma_line);
  take("--seed", "seed", seed);
  restart_given = restart_given || app.count("--restart") > 0;
  config = apply_json(flags, config);

  // Static MO-CMA-MAE pairs with cycle restarts; everything else restarts on
  // convergence.
  if (!restart_given) {
    config.restart = config.algorithm == Algorithm::mo_cma_mae && config.size_limit ? RestartRule::cycle
                                                                                    : RestartRule::basic;
  }

  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  invocation.config = std::move(config);
  if (app.count("--out")) invocation.out_dir = out_dir;
  return invocation;
}

void write_metrics_csv(std::ostream& out, const std::vector<IterationMetrics>& metrics) {
  prepare(out);
  out << "iteration,evaluations,moqd_score,coverage,restarts,failures\n";
  for (const auto& m : metrics) {
    out << m.iteration << ',' << m.evaluations << ',' << m.moqd_score << ',' << m.coverage << ',' << m.restarts
        << ',' << m.failures << '\n';
  }
}

void write_heatmap_csv(std::ostream& out, const CvtArchive& archive) {
  prepare(out);
  out << "cell,centroid_0,centroid_1,hypervolume,ps_size,visits\n";
  for (const auto& row : archive.export_heatmap()) {
    out << row.cell << ',' << row.centroid.at(0) << ',' << row.centroid.at(1) << ',' << row.hypervolume << ','
        << row.pareto_size << ',' << row.visits << '\n';
  }
}

void write_visits_csv(std::ostream& out, const CvtArchive& archive) {
  prepare(out);
  out << "cell,visits\n";
  const auto visits = archive.visits();
  for (std::size_t i = 0; i < visits.size(); ++i) out << i << ',' << visits[i] << '\n';
}

json fronts_document(const RunResult& result) {
  auto rows = [](const auto& vectors) {
    json out = json::array();
    for (const auto& v : vectors) out.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return out;
  };
  const CvtArchive& archive = result.archive;
  json cells = json::array();
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const CellState& cell = archive.cell(i);
    if (cell.empty() && cell.threshold.empty()) continue;
    cells.push_back({{"cell", i},
                     {"centroid", archive.centroids()[i]},
                     {"visits", cell.visits},
                     {"hypervolume", cell.hypervolume},
                     {"solutions", rows(cell.solutions)},
                     {"objectives", rows(cell.objectives)},
                     {"threshold", rows(cell.threshold)}});
  }
  json doc{{"reference", archive.reference()}, {"cells", std::move(cells)}};
  if (result.global) {
    doc["global"] = {{"solutions", rows(result.global->solutions)}, {"objectives", rows(result.global->objectives)}};
  }
  return doc;
}

int run_and_export(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    log << "error: cannot create output directory '" << out_dir.string() << "': " << ec.message() << '\n';
    return 1;
  }
  auto open = [&](const char* name, std::ofstream& stream) {
    stream.open(out_dir / name, std::ios::out | std::ios::trunc);
    if (!stream) log << "error: cannot write '" << (out_dir / name).string() << "'\n";
    return static_cast<bool>(stream);
  };

  std::ofstream resolved;
  if (!open("config.resolved", resolved)) return 1;
  resolved << to_json(config).dump(2) << '\n';
  resolved.close();

  std::optional<RunResult> result;
  try {
    result.emplace(run(config));
  } catch (const std::exception& e) {
    log << "error: run aborted: " << e.what() << '\n';
    return 1;
  }

  std::ofstream metrics, heatmap, visits, fronts;
  if (!open("metrics.csv", metrics) || !open("heatmap.csv", heatmap) || !open("visits.csv", visits) ||
      !open("fronts.json", fronts)) {
    return 1;
  }
  write_metrics_csv(metrics, result->metrics);
  write_heatmap_csv(heatmap, result->archive);
  write_visits_csv(visits, result->archive);
  fronts << fronts_document(*result).dump() << '\n';

  for (std::ofstream* s : {&metrics, &heatmap, &visits, &fronts}) {
    s->flush();
    if (!*s) {
      log << "error: failed while writing outputs to '" << out_dir.string() << "'\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace moqd::cli
