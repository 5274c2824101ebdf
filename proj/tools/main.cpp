#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sitaware/csv.hpp"
#include "sitaware/errors.hpp"
#include "sitaware/ingest.hpp"
#include "sitaware/meta.hpp"
#include "sitaware/nn.hpp"
#include "sitaware/numeric.hpp"
#include "sitaware/preprocess.hpp"
#include "sitaware/rng.hpp"
#include "sitaware/score.hpp"
#include "sitaware/search.hpp"
#include "sitaware/svg_plots.hpp"
#include "sitaware/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace sitaware;

namespace {

// Exit codes: 0 ok, 1 generic error, 2 missing file, 3 validation failure,
// 4 training divergence.
constexpr int kExitError = 1;
constexpr int kExitMissingFile = 2;
constexpr int kExitValidation = 3;
constexpr int kExitDivergence = 4;

// Reproducibility header embedded in every output file.
struct RunMeta {
  std::string command;
  std::uint64_t seed = kDefaultSeed;
  std::string seed_source = "default";
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> content hash
};

ordered_json to_json(const RunMeta& meta) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = meta.command;
  j["seed"] = meta.seed;
  j["seed_source"] = meta.seed_source;
  auto& inputs = j["inputs"] = ordered_json::object();
  for (const auto& [path, hash] : meta.inputs) inputs[path] = hash;
  return j;
}

std::string quote_arg(const std::string& arg) {
  if (arg.find_first_of(" \t\"") == std::string::npos) return arg;
  std::string out = "\"";
  for (char c : arg) {
    if (c == '"') out += "\\\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) out += ' ';
    out += quote_arg(argv[i]);
  }
  return out;
}

std::string read_input(const std::string& path, RunMeta& meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();
  meta.inputs.emplace_back(path, fingerprint(content));
  return content;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
  std::cout << "wrote " << path << "\n";
}

void write_json_file(const std::string& path, const ordered_json& j) {
  write_atomic(path, j.dump(2) + "\n");
}

// Leading metadata comment; '#'-prefixed lines are skipped by readers.
std::string meta_comment(const RunMeta& meta, ordered_json extra = {}) {
  ordered_json j = to_json(meta);
  if (extra.is_object())
    for (auto& [key, value] : extra.items()) j[key] = value;
  return "# " + j.dump() + "\n";
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": '" + item + "' is not an integer");
    }
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  return out;
}

// "lo..hi" inclusive.
std::vector<int> parse_grid(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw InputError("--grid expects 'lo..hi', got '" + text + "'");
  int lo = 0, hi = 0;
  try {
    lo = std::stoi(text.substr(0, dots));
    hi = std::stoi(text.substr(dots + 2));
  } catch (const std::exception&) {
    throw InputError("--grid expects 'lo..hi', got '" + text + "'");
  }
  if (lo < 1 || hi < lo) throw InputError("--grid needs 1 <= lo <= hi, got '" + text + "'");
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

// Dataset files may start with '#'-prefixed metadata lines; the first one may
// carry a JSON object naming the target column.
struct LoadedDataset {
  prep::Dataset data;
  std::optional<std::string> target_from_meta;
};

LoadedDataset load_dataset(const std::string& path, RunMeta& meta, bool want_target) {
  const std::string content = read_input(path, meta);
  std::optional<std::string> target;
  std::string body;
  std::istringstream in(content);
  std::string line;
  bool first_comment = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      if (first_comment) {
        first_comment = false;
        const auto brace = line.find('{');
        if (brace != std::string::npos) {
          const auto j = ordered_json::parse(line.substr(brace), nullptr, false);
          if (!j.is_discarded() && j.contains("target") && j.at("target").is_string())
            target = j.at("target").get<std::string>();
        }
      }
      continue;
    }
    body += line;
    body += '\n';
  }

  LoadedDataset out;
  out.target_from_meta = target;
  if (target) {
    out.data = prep::dataset_from_csv(body, target);
  } else if (want_target) {
    // No metadata: the last column is the target by convention.
    const auto records = parse_csv(body);
    if (records.empty() || records.front().fields.size() < 2)
      throw SchemaError("dataset needs at least one feature column and a target column");
    out.data = prep::dataset_from_csv(body, records.front().fields.back());
  } else {
    out.data = prep::dataset_from_csv(body, std::nullopt);
  }
  return out;
}

void write_plot_files(const std::string& dir, const meta::PlotData& plot, const RunMeta& meta,
                      const std::string& format) {
  const std::string comment_json = to_json(meta).dump();
  if (format == "svg") {
    const std::string header = "<!-- " + comment_json + " -->\n";
    write_atomic((fs::path(dir) / "forest.svg").string(), header + plots::forest_svg(plot));
    write_atomic((fs::path(dir) / "funnel.svg").string(), header + plots::funnel_svg(plot));
    write_atomic((fs::path(dir) / "residuals.svg").string(), header + plots::residual_svg(plot));
  } else {
    const std::string header = "# " + comment_json + "\n";
    write_atomic((fs::path(dir) / "forest.csv").string(), header + plots::forest_csv(plot));
    write_atomic((fs::path(dir) / "funnel.csv").string(), header + plots::funnel_csv(plot));
    write_atomic((fs::path(dir) / "residuals.csv").string(), header + plots::residual_csv(plot));
  }
}

ordered_json pooling_document(const RunMeta& meta,
                              std::span<const meta::EffectEstimate> estimates,
                              const meta::PoolingResult& result, const meta::PlotData& plot) {
  ordered_json j;
  j["meta"] = to_json(meta);
  j["ci_level"] = plot.ci_level;
  j["estimates"] = meta::estimates_to_json(estimates);
  j["pooling"] = meta::to_json(result);
  j["plot_data"] = meta::to_json(plot);
  return j;
}

struct BiasRates {
  double bias_rate = 0.0;
  int n_reports = 0;
};

std::map<std::string, BiasRates> parse_bias_rates(const std::string& content) {
  const auto records = parse_csv(content);
  if (records.empty()) throw SchemaError("bias-rate file is empty");
  const auto& header = records.front().fields;
  if (header.size() != 3 || header[0] != "source" || header[1] != "bias_rate" ||
      header[2] != "n_reports")
    throw SchemaError("bias-rate file header must be 'source,bias_rate,n_reports'");
  std::map<std::string, BiasRates> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 3)
      throw ParseError("expected 3 fields, got " + std::to_string(rec.fields.size()), rec.line);
    try {
      out[rec.fields[0]] = {std::stod(rec.fields[1]), std::stoi(rec.fields[2])};
    } catch (const std::exception&) {
      throw ParseError("bad bias_rate/n_reports for source '" + rec.fields[0] + "'", rec.line);
    }
  }
  return out;
}

// ---- subcommand bodies ----------------------------------------------------

int cmd_ingest(const std::string& in_path, const std::string& out_path, RunMeta meta) {
  const auto table = ingest::parse_report_table(read_input(in_path, meta));
  ordered_json j;
  j["meta"] = to_json(meta);
  const auto body = ingest::to_json(table);
  j["columns"] = body.at("columns");
  j["rows"] = body.at("rows");
  write_json_file(out_path, j);
  std::cout << "table ok: " << table.rows.size() << " rows, " << table.columns.size()
            << " indicator columns\n";
  return 0;
}

int cmd_meta_two_arm(const std::string& table_path, const std::string& arms, double ci,
                     const std::string& out_path, const std::string& plots_dir, RunMeta meta) {
  const auto table = ingest::parse_report_table(read_input(table_path, meta));
  const auto arm_names = split(arms, ',');
  if (arm_names.size() != 2) throw InputError("--arms expects exactly two column names");
  for (const auto& name : arm_names)
    if (!table.has_column(name)) throw InputError("no such indicator column: " + name);

  std::vector<meta::EffectEstimate> estimates;
  estimates.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::int64_t a = 0, b = 0;
    for (const auto& [name, count] : row.values) {
      if (name == arm_names[0]) a = count;
      if (name == arm_names[1]) b = count;
    }
    estimates.push_back(meta::effect_from_two_arm(a, b, row.source_id));
  }

  const auto result = meta::pool(estimates);
  const auto plot = meta::plot_data(estimates, result, ci);
  write_json_file(out_path, pooling_document(meta, estimates, result, plot));
  if (!plots_dir.empty()) write_plot_files(plots_dir, plot, meta, "svg");
  std::cout << "pooled " << estimates.size() << " studies: common=" << result.pooled_common
            << " random=" << result.pooled_random << " I2=" << result.I2
            << " tau2=" << result.tau2 << "\n";
  return 0;
}

int cmd_meta_pooled(const std::string& table_path, const std::string& column,
                    const std::string& bias_path, const std::string& out_path,
                    const std::string& plots_dir, RunMeta meta) {
  const auto table = ingest::parse_report_table(read_input(table_path, meta));
  if (!table.has_column(column)) throw InputError("no such indicator column: " + column);
  const auto rates = parse_bias_rates(read_input(bias_path, meta));

  std::vector<meta::EffectEstimate> estimates;
  estimates.reserve(table.rows.size());
  const auto values = table.column_as_reals(column);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& source = table.rows[i].source_id;
    const auto it = rates.find(source);
    if (it == rates.end()) throw InputError("no bias rate for source '" + source + "'");
    estimates.push_back(meta::effect_from_single_source(values[i], it->second.bias_rate,
                                                        it->second.n_reports, source));
  }

  const auto result = meta::pool(estimates);
  const auto plot = meta::plot_data(estimates, result);
  write_json_file(out_path, pooling_document(meta, estimates, result, plot));
  if (!plots_dir.empty()) write_plot_files(plots_dir, plot, meta, "svg");
  std::cout << "pooled " << estimates.size() << " studies: common=" << result.pooled_common
            << " random=" << result.pooled_random << "\n";
  return 0;
}

int cmd_prep(const std::string& table_path, const std::string& coeffs_text, double noise_sd,
             const std::string& out_path, RunMeta meta) {
  const auto table = ingest::parse_report_table(read_input(table_path, meta));
  const auto raw = prep::dataset_from_report_table(table);

  std::vector<double> coefficients;
  if (!coeffs_text.empty()) {
    coefficients = parse_real_list(coeffs_text, "--coeffs");
  } else {
    coefficients.assign(prep::kDefaultTargetCoefficients.begin(),
                        prep::kDefaultTargetCoefficients.end());
    if (coefficients.size() != raw.cols())
      throw ShapeError("table has " + std::to_string(raw.cols()) +
                       " indicator columns; pass --coeffs with one value per column");
  }

  const auto scaler = prep::minmax_fit(raw);
  const auto normalized = prep::minmax_apply(scaler, raw);
  const auto with_target = prep::synthesize_target(normalized, coefficients, noise_sd, meta.seed);

  ordered_json extra;
  extra["coefficients"] = coefficients;
  extra["noise_sd"] = noise_sd;
  extra["target"] = *with_target.target_name;
  extra["scaler"] = prep::to_json(scaler);
  write_atomic(out_path, meta_comment(meta, extra) + prep::to_csv(with_target));
  std::cout << "normalized " << with_target.rows() << " rows, " << with_target.cols()
            << " features + target " << *with_target.target_name << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& hidden_text, double threshold,
              long step_max, const std::string& out_path, RunMeta meta) {
  const auto loaded = load_dataset(data_path, meta, true);

  nn::NetConfig config;
  config.n_inputs = static_cast<int>(loaded.data.cols());
  if (!hidden_text.empty()) config.hidden_sizes = parse_int_list(hidden_text, "--hidden");
  config.threshold = threshold;
  config.step_max = step_max;
  config.seed = meta.seed;

  const auto result = nn::train(config, loaded.data);

  ordered_json j;
  j["meta"] = to_json(meta);
  const auto model = nn::model_to_json(result);
  j["config"] = model.at("config");
  j["layers"] = model.at("layers");
  j["train_stats"] = model.at("train_stats");
  write_json_file(out_path, j);
  std::cout << "error=" << result.error << " reached_threshold=" << result.reached_threshold
            << " steps=" << result.steps << " converged=" << (result.converged ? "yes" : "no")
            << "\n";
  return 0;
}

int cmd_search(const std::string& data_path, const std::string& depths_text, int restarts,
               const std::string& grid_text, const std::string& out_path, RunMeta meta) {
  const auto loaded = load_dataset(data_path, meta, true);

  std::vector<std::vector<int>> candidates;
  for (const auto& segment : split(depths_text, '|'))
    candidates.push_back(parse_int_list(segment, "--depths"));
  if (candidates.empty()) throw InputError("--depths lists no candidate architectures");

  const search::TrainParams params;
  const auto table =
      search::compare_architectures(loaded.data, candidates, restarts, meta.seed, params);
  std::cout << search::render_text(table);
  const auto& best = search::select_best(table);

  ordered_json j;
  j["meta"] = to_json(meta);
  j["comparison"] = search::to_json(table);
  {
    ordered_json sel;
    sel["hidden_sizes"] = best.hidden_sizes;
    sel["error"] = best.error;
    sel["steps"] = best.steps;
    sel["seed_used"] = best.seed_used;
    sel["converged"] = best.converged;
    j["selected"] = std::move(sel);
  }

  if (!grid_text.empty()) {
    const auto grid = parse_grid(grid_text);
    const int depth = static_cast<int>(best.hidden_sizes.size());
    if (depth < 1) throw InputError("selected architecture has no hidden layers to refine");
    const auto refined =
        search::stepwise_refine(loaded.data, depth, grid, meta.seed, params, restarts);
    ordered_json r;
    r["best_sizes"] = refined.best_sizes;
    auto& trace = r["trace"] = ordered_json::array();
    for (const auto& stage : refined.trace) trace.push_back(search::to_json(stage));
    j["refinement"] = std::move(r);
    std::cout << "refined sizes:";
    for (int s : refined.best_sizes) std::cout << " " << s;
    std::cout << "\n";
  }

  write_json_file(out_path, j);
  return 0;
}

int cmd_gw(const std::string& model_path, const std::string& data_path,
           const std::string& out_path, RunMeta meta) {
  const auto model_json = ordered_json::parse(read_input(model_path, meta));
  const auto model = nn::model_from_json(model_json);

  auto loaded = load_dataset(data_path, meta, false);
  const int p = model.network.config.n_inputs;
  if (!loaded.data.y && static_cast<int>(loaded.data.cols()) == p + 1) {
    // Plain CSV with a trailing target column; drop it for the sensitivities.
    loaded.data =
        prep::dataset_from_csv(prep::to_csv(loaded.data), loaded.data.feature_names.back());
  }

  const auto gw = nn::generalized_weights(model.network, loaded.data);

  std::string body = csv_row(loaded.data.feature_names);
  std::vector<std::string> fields;
  for (const auto& row : gw) {
    fields.clear();
    for (double v : row) fields.push_back(format_double(v));
    body += csv_row(fields);
  }
  write_atomic(out_path, meta_comment(meta) + body);
  std::cout << "generalized weights: " << gw.size() << " x "
            << (gw.empty() ? 0 : gw.front().size()) << "\n";
  return 0;
}

int cmd_score(const std::string& matrix_path, const std::string& weights_path,
              const std::string& out_path, RunMeta meta) {
  const auto matrix =
      ingest::parameter_matrix_from_json(ordered_json::parse(read_input(matrix_path, meta)));
  const auto weights =
      score::weights_from_json(ordered_json::parse(read_input(weights_path, meta)));
  const double value = score::situation_score(matrix, weights);

  ordered_json j;
  j["meta"] = to_json(meta);
  j["score"] = value;
  write_json_file(out_path, j);
  std::cout << "score=" << format_double(value) << "\n";
  return 0;
}

int cmd_report(const std::string& meta_path, const std::string& format,
               const std::string& out_dir, RunMeta meta) {
  const auto doc = ordered_json::parse(read_input(meta_path, meta));
  if (!doc.contains("plot_data"))
    throw SchemaError("input is not a pooling result file (no 'plot_data' key)");
  const auto plot = meta::plot_data_from_json(doc.at("plot_data"));
  write_plot_files(out_dir, plot, meta, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "multi-source report fusion, meta-analysis, network training and situation scoring"};
  app.require_subcommand(1);

  std::uint64_t seed_flag = kDefaultSeed;

  std::string in_path, out_path, table_path, data_path, model_path, matrix_path, weights_path,
      meta_path, plots_dir, out_dir;
  std::string arms, column, bias_path, coeffs, hidden, depths, grid, format = "svg";
  double ci = 0.95;
  double noise_sd = prep::kDefaultNoiseSd;
  double threshold = 0.01;
  long step_max = 100000;
  int restarts = 10;

  auto* ingest_cmd = app.add_subcommand("ingest", "parse + validate a report table");
  ingest_cmd->add_option("--in", in_path, "report table CSV")->required();
  ingest_cmd->add_option("--out", out_path, "canonical JSON output")->required();

  auto* two_arm = app.add_subcommand("meta-two-arm", "two-arm meta-analysis of two columns");
  two_arm->add_option("--table", table_path, "report table CSV")->required();
  two_arm->add_option("--arms", arms, "the two indicator columns, e.g. a34,a35")->required();
  two_arm->add_option("--ci", ci, "confidence level (default 0.95)");
  two_arm->add_option("--out", out_path, "pooling JSON output")->required();
  two_arm->add_option("--plots", plots_dir, "directory for forest/funnel/residual SVGs");

  auto* pooled = app.add_subcommand("meta-pooled", "single-column pooling with bias rates");
  pooled->add_option("--table", table_path, "report table CSV")->required();
  pooled->add_option("--col", column, "indicator column")->required();
  pooled->add_option("--bias-rates", bias_path, "CSV source,bias_rate,n_reports")->required();
  pooled->add_option("--out", out_path, "pooling JSON output")->required();
  pooled->add_option("--plots", plots_dir, "directory for forest/funnel/residual SVGs");

  auto* prep_cmd = app.add_subcommand("prep", "normalize a table and add the virtual target");
  prep_cmd->add_option("--table", table_path, "report table CSV")->required();
  prep_cmd->add_option("--coeffs", coeffs, "target coefficients (default 0.4,0.1,0.4,0.1)");
  prep_cmd->add_option("--noise-sd", noise_sd, "target noise sd (default 0.01)");
  prep_cmd->add_option("--seed", seed_flag, "target noise seed");
  prep_cmd->add_option("--out", out_path, "dataset CSV output")->required();

  auto* train_cmd = app.add_subcommand("train", "train a network on a prepared dataset");
  train_cmd->add_option("--data", data_path, "dataset CSV")->required();
  train_cmd->add_option("--hidden", hidden, "hidden sizes, e.g. 10,5 (empty = linear)");
  train_cmd->add_option("--threshold", threshold, "gradient stop threshold (default 0.01)");
  train_cmd->add_option("--stepmax", step_max, "step budget (default 100000)");
  train_cmd->add_option("--seed", seed_flag, "init seed");
  train_cmd->add_option("--out", out_path, "model JSON output")->required();

  auto* search_cmd = app.add_subcommand("search", "compare architectures, then refine");
  search_cmd->add_option("--data", data_path, "dataset CSV")->required();
  search_cmd->add_option("--depths", depths, "candidates, e.g. \"5|10,5|4,5,3\"")->required();
  search_cmd->add_option("--restarts", restarts, "restarts per candidate (default 10)");
  search_cmd->add_option("--seed", seed_flag, "search seed");
  search_cmd->add_option("--grid", grid, "per-layer refinement grid, e.g. 1..16");
  search_cmd->add_option("--out", out_path, "comparison JSON output")->required();

  auto* gw_cmd = app.add_subcommand("gw", "generalized weights of a trained model");
  gw_cmd->add_option("--model", model_path, "model JSON")->required();
  gw_cmd->add_option("--data", data_path, "dataset CSV")->required();
  gw_cmd->add_option("--out", out_path, "sensitivity CSV output")->required();

  auto* score_cmd = app.add_subcommand("score", "situation score of a parameter matrix");
  score_cmd->add_option("--matrix", matrix_path, "parameter matrix JSON")->required();
  score_cmd->add_option("--weights", weights_path, "weights JSON {bias, omega[25]}")->required();
  score_cmd->add_option("--out", out_path, "score JSON output")->required();

  auto* report_cmd = app.add_subcommand("report", "re-emit plots from a pooling result");
  report_cmd->add_option("--meta", meta_path, "pooling JSON from meta-two-arm/meta-pooled")
      ->required();
  report_cmd->add_option("--format", format, "svg or csv (default svg)")
      ->check(CLI::IsMember({"svg", "csv"}));
  report_cmd->add_option("--out-dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  // Flag wins over the environment override, which wins over the default; the
  // resolved seed is echoed in every output's metadata.
  RunMeta meta;
  meta.command = command_line(argc, argv);
  if (const char* env = std::getenv(std::string(kSeedEnvVar).c_str()); env != nullptr) {
    try {
      meta.seed = std::stoull(env);
      meta.seed_source = "env";
    } catch (const std::exception&) {
      std::cerr << "ignoring non-numeric " << kSeedEnvVar << "='" << env << "'\n";
    }
  }
  for (const auto* cmd : {prep_cmd, train_cmd, search_cmd})
    if (cmd->parsed() && cmd->count("--seed") > 0) {
      meta.seed = seed_flag;
      meta.seed_source = "flag";
    }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(in_path, out_path, std::move(meta));
    if (two_arm->parsed())
      return cmd_meta_two_arm(table_path, arms, ci, out_path, plots_dir, std::move(meta));
    if (pooled->parsed())
      return cmd_meta_pooled(table_path, column, bias_path, out_path, plots_dir,
                             std::move(meta));
    if (prep_cmd->parsed())
      return cmd_prep(table_path, coeffs, noise_sd, out_path, std::move(meta));
    if (train_cmd->parsed())
      return cmd_train(data_path, hidden, threshold, step_max, out_path, std::move(meta));
    if (search_cmd->parsed())
      return cmd_search(data_path, depths, restarts, grid, out_path, std::move(meta));
    if (gw_cmd->parsed()) return cmd_gw(model_path, data_path, out_path, std::move(meta));
    if (score_cmd->parsed())
      return cmd_score(matrix_path, weights_path, out_path, std::move(meta));
    if (report_cmd->parsed()) return cmd_report(meta_path, format, out_dir, std::move(meta));
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingFile;
  } catch (const ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << "\n";
    return kExitValidation;
  } catch (const DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
