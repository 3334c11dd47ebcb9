#include "dln/config.hpp"

#include <fstream>
#include <sstream>

#include "dln/digest.hpp"
#include "dln/error.hpp"
#include "dln/presets.hpp"

namespace dln {

using nlohmann::json;

std::string to_string(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::RunsCsv: return "runs_csv";
    case ArtifactKind::HistogramJson: return "histogram_json";
    case ArtifactKind::SummaryJson: return "summary_json";
    case ArtifactKind::HeatmapCsv: return "heatmap_csv";
  }
  return "unknown";
}

ArtifactKind artifact_from_string(const std::string& text) {
  for (auto k : {ArtifactKind::RunsCsv, ArtifactKind::HistogramJson, ArtifactKind::SummaryJson,
                 ArtifactKind::HeatmapCsv}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown output kind '" + text + "'");
}

namespace {

std::string quantity_name(HistogramQuantity q) {
  return q == HistogramQuantity::EffectiveRank ? "effective_rank" : "top_singular_value";
}

HistogramQuantity quantity_from(const std::string& text) {
  if (text == "effective_rank") return HistogramQuantity::EffectiveRank;
  if (text == "top_singular_value") return HistogramQuantity::TopSingularValue;
  throw ConfigError("unknown histogram quantity '" + text + "'");
}

std::string measure_name(VolumeMeasure m) {
  return m == VolumeMeasure::Lebesgue ? "dW" : "dSigma";
}

VolumeMeasure measure_from(const std::string& text) {
  if (text == "dW") return VolumeMeasure::Lebesgue;
  if (text == "dSigma") return VolumeMeasure::SingularCoordinates;
  throw ConfigError("unknown heatmap measure '" + text + "' (expected dW or dSigma)");
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& doc, const char* what) {
  if (!doc.is_array() || doc.empty()) {
    throw ConfigError(std::string(what) + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(doc.size());
  const auto cols = static_cast<Eigen::Index>(doc.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = doc[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(std::string(what) + ": rows have different lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json depth_to_json(const Depth& d) {
  return d.is_infinite() ? json("inf") : json(d.layers());
}

Depth depth_from_json(const json& doc) {
  if (doc.is_string()) return Depth::parse(doc.get<std::string>());
  return Depth::finite(doc.get<int>());
}

json default_document() {
  ExperimentConfig c;
  c.name = "experiment";
  c.problem.phi = Matrix::Zero(1, 1);
  c.problem.mask = Matrix::Ones(1, 1);
  json doc = config_to_json(c);
  doc["problem"].erase("phi");
  doc["problem"].erase("mask");
  return doc;
}

ExperimentConfig parse_document(const json& doc) {
  ExperimentConfig c;
  c.name = doc.at("name").get<std::string>();

  const json& problem = doc.at("problem");
  c.preset = problem.value("preset", std::string());
  if (!problem.contains("phi") || !problem.contains("mask")) {
    throw ConfigError("problem: needs a preset or both phi and mask");
  }
  c.problem.phi = matrix_from_json(problem.at("phi"), "problem.phi");
  c.problem.mask = matrix_from_json(problem.at("mask"), "problem.mask");

  const json& flow = doc.at("flow");
  c.flow.depth = depth_from_json(flow.at("depth"));
  c.flow.dt = flow.at("dt").get<double>();
  c.flow.max_time = flow.at("max_time").get<double>();
  c.flow.energy_tol = flow.at("energy_tol").get<double>();
  c.flow.gap_tol = flow.at("gap_tol").get<double>();
  c.flow.max_halvings = flow.at("max_halvings").get<int>();
  c.flow.fixed_rank = flow.at("fixed_rank").get<bool>();

  const json& init = doc.at("init");
  c.init.mu = init.at("mu").get<double>();
  c.init.sd = init.at("sd").get<double>();
  c.init.d = c.problem.phi.rows();
  c.rank_one_init = init.at("rank_one").get<bool>();

  c.n_runs = doc.at("n_runs").get<std::int64_t>();
  c.seed_base = doc.at("seed_base").get<std::uint64_t>();

  c.outputs.clear();
  for (const auto& kind : doc.at("outputs")) {
    c.outputs.push_back(artifact_from_string(kind.get<std::string>()));
  }

  const json& hist = doc.at("histogram");
  c.histogram.quantity = quantity_from(hist.at("quantity").get<std::string>());
  c.histogram.lo = hist.at("lo").get<double>();
  c.histogram.hi = hist.at("hi").get<double>();
  c.histogram.width = hist.at("width").get<double>();

  const json& heat = doc.at("heatmap");
  c.heatmap.lo = heat.at("lo").get<double>();
  c.heatmap.hi = heat.at("hi").get<double>();
  c.heatmap.resolution = heat.at("resolution").get<int>();
  c.heatmap.measure = measure_from(heat.at("measure").get<std::string>());
  c.heatmap.depth = depth_from_json(heat.at("depth"));

  const json& mc = doc.at("mc_volume");
  c.mc_volume.cube_width = mc.at("cube_width").get<double>();
  c.mc_volume.sv_floor = mc.at("sv_floor").get<double>();
  c.mc_volume.n_samples = mc.at("n_samples").get<std::int64_t>();
  c.mc_volume.competitors = mc.at("competitors").get<int>();
  c.mc_volume.competitor_sd = mc.at("competitor_sd").get<double>();
  c.mc_volume.seed = mc.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    problem.validate();
    flow.validate();
    init.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (init.d != problem.dim()) throw ConfigError("init dimension does not match the problem");
  if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
  if (rank_one_init && !flow.fixed_rank) {
    throw ConfigError("rank_one init needs flow.fixed_rank so the flow stays on the rank-one set");
  }
  if (!(histogram.width > 0.0) || !(histogram.hi > histogram.lo)) {
    throw ConfigError("histogram: need hi > lo and width > 0");
  }
  if (heatmap.resolution < 2 || !(heatmap.hi > heatmap.lo)) {
    throw ConfigError("heatmap: need resolution >= 2 and hi > lo");
  }
  if (!(mc_volume.cube_width > 0.0) || !(mc_volume.sv_floor > 0.0) || mc_volume.n_samples < 1 ||
      mc_volume.competitors < 0 || !(mc_volume.competitor_sd > 0.0)) {
    throw ConfigError("mc_volume: invalid parameters");
  }
}

ExperimentConfig config_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    json merged = default_document();
    if (doc.contains("problem") && doc["problem"].contains("preset")) {
      merged.merge_patch(find_preset(doc["problem"]["preset"].get<std::string>()).defaults);
    }
    merged.merge_patch(doc);
    ExperimentConfig c = parse_document(merged);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["problem"] = {{"phi", matrix_to_json(c.problem.phi)},
                    {"mask", matrix_to_json(c.problem.mask)}};
  if (!c.preset.empty()) doc["problem"]["preset"] = c.preset;
  doc["flow"] = {{"depth", depth_to_json(c.flow.depth)},
                 {"dt", c.flow.dt},
                 {"max_time", c.flow.max_time},
                 {"energy_tol", c.flow.energy_tol},
                 {"gap_tol", c.flow.gap_tol},
                 {"max_halvings", c.flow.max_halvings},
                 {"fixed_rank", c.flow.fixed_rank}};
  doc["init"] = {{"mu", c.init.mu}, {"sd", c.init.sd}, {"rank_one", c.rank_one_init}};
  doc["n_runs"] = c.n_runs;
  doc["seed_base"] = c.seed_base;
  doc["outputs"] = json::array();
  for (auto k : c.outputs) doc["outputs"].push_back(to_string(k));
  doc["histogram"] = {{"quantity", quantity_name(c.histogram.quantity)},
                      {"lo", c.histogram.lo},
                      {"hi", c.histogram.hi},
                      {"width", c.histogram.width}};
  doc["heatmap"] = {{"lo", c.heatmap.lo},
                    {"hi", c.heatmap.hi},
                    {"resolution", c.heatmap.resolution},
                    {"measure", measure_name(c.heatmap.measure)},
                    {"depth", depth_to_json(c.heatmap.depth)}};
  doc["mc_volume"] = {{"cube_width", c.mc_volume.cube_width},
                      {"sv_floor", c.mc_volume.sv_floor},
                      {"n_samples", c.mc_volume.n_samples},
                      {"competitors", c.mc_volume.competitors},
                      {"competitor_sd", c.mc_volume.competitor_sd},
                      {"seed", c.mc_volume.seed}};
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  return to_hex(fnv1a64(config_to_json(config).dump()));
}

}  // namespace dln
