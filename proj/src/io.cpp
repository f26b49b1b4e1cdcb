#include "swf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace swf {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

// Reads the header and data lines, stripping a trailing '\r'.
std::vector<std::string> read_lines(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (in.bad()) throw IoError(path, "read failed");
  if (lines.empty()) throw IoError(path, "missing header row");
  return lines;
}

std::string utility_header(char prefix, std::size_t d) {
  std::string out;
  for (std::size_t j = 0; j < d; ++j) {
    if (j > 0) out += ',';
    out += prefix;
    out += '_';
    out += std::to_string(j);
  }
  return out;
}

void append_row(std::string& line, std::span<const double> row) {
  for (double x : row) {
    line += format_double(x);
    line += ',';
  }
}

Label parse_label(const std::string& field) {
  const double y = parse_double(field);
  if (y == 1.0) return Label::kPositive;
  if (y == -1.0) return Label::kNegative;
  throw std::invalid_argument("label must be -1 or 1, got '" + field + "'");
}

json optional_number(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

// NaN is stored as null in JSON.
json number_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

json noise_to_json(const NoiseSpec& noise) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NoNoise>) {
          return {{"kind", "none"}};
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return {{"kind", "gaussian"}, {"nu", n.nu}};
        } else if constexpr (std::is_same_v<T, FlipNoise>) {
          return {{"kind", "flip"}, {"rho", n.rho}};
        } else {
          return {{"kind", "logistic"}, {"tau", n.tau}, {"tau_max", n.tau_max}};
        }
      },
      noise);
}

NoiseSpec noise_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "none") return NoNoise{};
  if (kind == "gaussian") return GaussianNoise{j.at("nu").get<double>()};
  if (kind == "flip") return FlipNoise{j.at("rho").get<double>()};
  if (kind == "logistic") {
    return LogisticNoise{j.at("tau").get<double>(), j.at("tau_max").get<double>()};
  }
  throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& field) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (field == "-nan") return -std::numeric_limits<double>::quiet_NaN();
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw std::invalid_argument("not a number: '" + field + "'");
  }
  return x;
}

void write_cardinal_csv(const fs::path& path, const CardinalData& data) {
  if (data.u.rows() != data.y.size()) throw std::invalid_argument("row/label count mismatch");
  auto out = open_out(path);
  out << utility_header('u', data.u.cols()) << ",y\n";
  std::string line;
  for (std::size_t r = 0; r < data.y.size(); ++r) {
    line.clear();
    append_row(line, data.u.row(r));
    line += format_double(data.y[r]);
    out << line << '\n';
  }
  finish(out, path);
}

CardinalData read_cardinal_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  const auto header = split(lines[0]);
  if (header.size() < 2 || header.back() != "y") throw IoError(path, "header must end with y");
  const std::size_t d = header.size() - 1;
  CardinalData data;
  data.u = UtilityMatrix(0, d);
  std::vector<double> row(d);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i]);
    if (fields.size() != d + 1) {
      throw IoError(path, "line " + std::to_string(i + 1) + ": expected " +
                              std::to_string(d + 1) + " columns");
    }
    try {
      for (std::size_t j = 0; j < d; ++j) row[j] = parse_double(fields[j]);
      validate_utilities(row);
      data.y.push_back(parse_double(fields[d]));
    } catch (const std::invalid_argument& e) {
      throw IoError(path, "line " + std::to_string(i + 1) + ": " + e.what());
    }
    data.u.append_row(row);
  }
  return data;
}

void write_ordinal_csv(const fs::path& path, const OrdinalData& data) {
  if (data.pairs.size() != data.y.size()) throw std::invalid_argument("pair/label count mismatch");
  auto out = open_out(path);
  const std::size_t d = data.u.cols();
  out << utility_header('u', d) << ',' << utility_header('v', d) << ",y\n";
  std::string line;
  for (std::size_t k = 0; k < data.pairs.size(); ++k) {
    line.clear();
    append_row(line, data.u.row(data.pairs[k].u));
    append_row(line, data.u.row(data.pairs[k].v));
    line += std::to_string(to_int(data.y[k]));
    out << line << '\n';
  }
  finish(out, path);
}

OrdinalData read_ordinal_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  const auto header = split(lines[0]);
  if (header.size() < 3 || header.size() % 2 == 0 || header.back() != "y") {
    throw IoError(path, "header must hold 2d utility columns and y");
  }
  const std::size_t d = (header.size() - 1) / 2;
  OrdinalData data;
  data.u = UtilityMatrix(0, d);
  std::map<std::vector<double>, std::size_t> index;
  auto intern = [&](std::vector<double> row) {
    const auto [it, inserted] = index.emplace(std::move(row), data.u.rows());
    if (inserted) data.u.append_row(it->first);
    return it->second;
  };
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i]);
    if (fields.size() != 2 * d + 1) {
      throw IoError(path, "line " + std::to_string(i + 1) + ": expected " +
                              std::to_string(2 * d + 1) + " columns");
    }
    std::vector<double> u(d);
    std::vector<double> v(d);
    try {
      for (std::size_t j = 0; j < d; ++j) {
        u[j] = parse_double(fields[j]);
        v[j] = parse_double(fields[d + j]);
      }
      validate_utilities(u);
      validate_utilities(v);
      data.y.push_back(parse_label(fields[2 * d]));
    } catch (const std::invalid_argument& e) {
      throw IoError(path, "line " + std::to_string(i + 1) + ": " + e.what());
    }
    const std::size_t a = intern(std::move(u));
    const std::size_t b = intern(std::move(v));
    data.pairs.push_back({a, b});
  }
  return data;
}

json to_json(const GenConfig& cfg) {
  return {{"d", cfg.d},
          {"n", cfg.n},
          {"u_min", cfg.u_min},
          {"u_max", cfg.u_max},
          {"beta_param_range", {cfg.beta_param_range.first, cfg.beta_param_range.second}},
          {"pairs_per_sample", cfg.pairs_per_sample},
          {"noise", noise_to_json(cfg.noise)},
          {"seed", cfg.seed}};
}

GenConfig gen_config_from_json(const json& j) {
  GenConfig cfg;
  cfg.d = j.at("d").get<std::size_t>();
  cfg.n = j.at("n").get<std::size_t>();
  cfg.u_min = j.at("u_min").get<double>();
  cfg.u_max = j.at("u_max").get<double>();
  const auto& range = j.at("beta_param_range");
  cfg.beta_param_range = {range.at(0).get<double>(), range.at(1).get<double>()};
  cfg.pairs_per_sample = j.at("pairs_per_sample").get<std::size_t>();
  cfg.noise = noise_from_json(j.at("noise"));
  cfg.seed = j.at("seed").get<std::uint64_t>();
  validate(cfg);
  return cfg;
}

json to_json(const GroundTruth& gt) {
  return {{"w_star", gt.w_star.vector()},
          {"p_star", gt.p_star},
          {"tau_star", optional_number(gt.tau_star)}};
}

GroundTruth ground_truth_from_json(const json& j) {
  return {WeightVector(j.at("w_star").get<std::vector<double>>()), j.at("p_star").get<double>(),
          optional_from(j.at("tau_star"))};
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path out = csv;
  out.replace_extension(".json");
  return out;
}

void write_sidecar(const fs::path& path, const DatasetMeta& meta) {
  write_json(path, {{"kind", meta.kind}, {"gen", to_json(meta.gen)}, {"truth", to_json(meta.truth)}});
}

DatasetMeta read_sidecar(const fs::path& path) {
  const json j = read_json(path);
  try {
    DatasetMeta meta{gen_config_from_json(j.at("gen")), ground_truth_from_json(j.at("truth")),
                     j.at("kind").get<std::string>()};
    if (meta.kind != "cardinal" && meta.kind != "ordinal") {
      throw std::invalid_argument("kind must be cardinal or ordinal");
    }
    return meta;
  } catch (const json::exception& e) {
    throw IoError(path, e.what());
  }
}

json model_to_json(const ModelParams& params, TaskKind task) {
  return {{"w", params.w.vector()},
          {"p", params.p.value()},
          {"tau", optional_number(params.tau)},
          {"task", task_name(task)}};
}

ModelParams model_from_json(const json& j, TaskKind* task) {
  ModelParams params{WeightVector(j.at("w").get<std::vector<double>>()),
                     PowerParam(j.at("p").get<double>()), optional_from(j.at("tau"))};
  const TaskKind kind = parse_task(j.at("task").get<std::string>());
  if (kind == TaskKind::kOrdinalLogistic && !params.tau) {
    throw std::invalid_argument("logistic model needs tau");
  }
  if (task) *task = kind;
  return params;
}

json to_json(const GridConfig& grid) {
  return {{"p_lower", grid.p_lower}, {"p_upper", grid.p_upper}, {"step", grid.step}};
}

GridConfig grid_config_from_json(const json& j, GridConfig base) {
  base.p_lower = j.value("p_lower", base.p_lower);
  base.p_upper = j.value("p_upper", base.p_upper);
  base.step = j.value("step", base.step);
  validate(base);
  return base;
}

json to_json(const GDConfig& gd) {
  return {{"initial_lr", gd.initial_lr},       {"max_iters", gd.max_iters},
          {"patience", gd.patience},           {"min_lr", gd.min_lr},
          {"loss_window", gd.loss_window},     {"loss_range_tol", gd.loss_range_tol},
          {"clip_by_lr", gd.clip_by_lr}};
}

GDConfig gd_config_from_json(const json& j, GDConfig base) {
  base.initial_lr = j.value("initial_lr", base.initial_lr);
  base.max_iters = j.value("max_iters", base.max_iters);
  base.patience = j.value("patience", base.patience);
  base.min_lr = j.value("min_lr", base.min_lr);
  base.loss_window = j.value("loss_window", base.loss_window);
  base.loss_range_tol = j.value("loss_range_tol", base.loss_range_tol);
  base.clip_by_lr = j.value("clip_by_lr", base.clip_by_lr);
  validate(base);
  return base;
}

json to_json(const ExperimentConfig& cfg) {
  json gen = to_json(cfg.gen);
  gen.erase("n");
  gen.erase("noise");
  gen.erase("seed");
  return {{"gen", gen},
          {"grid", to_json(cfg.grid)},
          {"gd", to_json(cfg.gd)},
          {"task", task_name(cfg.task.kind)},
          {"tau_max", cfg.task.tau_max},
          {"n_values", cfg.n_values},
          {"noise_values", cfg.noise_values},
          {"repeats", cfg.repeats},
          {"test_fraction", cfg.test_fraction},
          {"master_seed", cfg.master_seed},
          {"p_star", cfg.p_star}};
}

ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig base) {
  if (j.contains("gen")) {
    const json& g = j.at("gen");
    base.gen.d = g.value("d", base.gen.d);
    base.gen.u_min = g.value("u_min", base.gen.u_min);
    base.gen.u_max = g.value("u_max", base.gen.u_max);
    if (g.contains("beta_param_range")) {
      const auto& r = g.at("beta_param_range");
      base.gen.beta_param_range = {r.at(0).get<double>(), r.at(1).get<double>()};
    }
    base.gen.pairs_per_sample = g.value("pairs_per_sample", base.gen.pairs_per_sample);
  }
  if (j.contains("grid")) base.grid = grid_config_from_json(j.at("grid"), base.grid);
  if (j.contains("gd")) base.gd = gd_config_from_json(j.at("gd"), base.gd);
  if (j.contains("task")) base.task.kind = parse_task(j.at("task").get<std::string>());
  base.task.tau_max = j.value("tau_max", base.task.tau_max);
  base.n_values = j.value("n_values", base.n_values);
  base.noise_values = j.value("noise_values", base.noise_values);
  base.repeats = j.value("repeats", base.repeats);
  base.test_fraction = j.value("test_fraction", base.test_fraction);
  base.master_seed = j.value("master_seed", base.master_seed);
  base.p_star = j.value("p_star", base.p_star);
  return base;
}

json report_to_json(const FitReport& report) {
  json j = model_to_json(report.params, report.task);
  j["train_loss"] = number_or_null(report.train_loss);
  j["starts_used"] = report.starts_used;
  j["iterations"] = report.iterations;
  json grid = json::array();
  for (const auto& g : report.per_grid_losses) {
    grid.push_back({{"p", g.p}, {"loss", number_or_null(g.loss)}, {"w", g.w},
                    {"tau", optional_number(g.tau)}});
  }
  j["per_grid_losses"] = std::move(grid);
  return j;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path, e.what());
  }
}

std::vector<std::string> metrics_header() {
  return {"n",
          "d",
          "noise",
          "repeat",
          "train_loss",
          "test_loss",
          "noiseless_test_loss",
          "kl_weights",
          "test_accuracy",
          "noiseless_test_accuracy",
          "p_hat",
          "tau_hat",
          "p_star",
          "tau_star",
          "truth_test_loss",
          "truth_noiseless_test_loss",
          "truth_test_accuracy",
          "truth_noiseless_test_accuracy",
          "eta",
          "one_minus_alpha"};
}

std::string metrics_row_to_csv(const MetricsRow& r) {
  std::string line = std::to_string(r.n) + ',' + std::to_string(r.d) + ',' +
                     format_double(r.noise) + ',' + std::to_string(r.repeat);
  for (double x : {r.train_loss, r.test_loss, r.noiseless_test_loss, r.kl_weights,
                   r.test_accuracy, r.noiseless_test_accuracy, r.p_hat, r.tau_hat, r.p_star,
                   r.tau_star, r.truth_test_loss, r.truth_noiseless_test_loss,
                   r.truth_test_accuracy, r.truth_noiseless_test_accuracy, r.eta,
                   r.one_minus_alpha}) {
    line += ',';
    line += format_double(x);
  }
  return line;
}

MetricsRow metrics_row_from_csv(const std::string& line) {
  const auto f = split(line);
  if (f.size() != metrics_header().size()) {
    throw std::invalid_argument("metrics row has " + std::to_string(f.size()) + " fields");
  }
  auto integer = [](const std::string& s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("not an integer: '" + s + "'");
    }
    return v;
  };
  MetricsRow r;
  r.n = static_cast<std::size_t>(integer(f[0]));
  r.d = static_cast<std::size_t>(integer(f[1]));
  r.noise = parse_double(f[2]);
  r.repeat = static_cast<int>(integer(f[3]));
  double* fields[] = {&r.train_loss, &r.test_loss, &r.noiseless_test_loss, &r.kl_weights,
                      &r.test_accuracy, &r.noiseless_test_accuracy, &r.p_hat, &r.tau_hat,
                      &r.p_star, &r.tau_star, &r.truth_test_loss, &r.truth_noiseless_test_loss,
                      &r.truth_test_accuracy, &r.truth_noiseless_test_accuracy, &r.eta,
                      &r.one_minus_alpha};
  for (std::size_t k = 0; k < std::size(fields); ++k) *fields[k] = parse_double(f[4 + k]);
  return r;
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricsRow>& rows) {
  auto out = open_out(path);
  const auto header = metrics_header();
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& r : rows) out << metrics_row_to_csv(r) << '\n';
  finish(out, path);
}

std::vector<MetricsRow> read_metrics_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  const auto header = split(lines[0]);
  if (header != metrics_header()) throw IoError(path, "unexpected metrics header");
  std::vector<MetricsRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    try {
      rows.push_back(metrics_row_from_csv(lines[i]));
    } catch (const std::invalid_argument& e) {
      throw IoError(path, "line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace swf
