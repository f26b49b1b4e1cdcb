#pragma once

// CSV datasets, JSON sidecars and model files. Doubles are written with 17
// significant digits so every value reads back bit-exactly.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swf/datagen.hpp"
#include "swf/learner.hpp"
#include "swf/metrics.hpp"
#include "swf/sweep.hpp"

namespace swf {

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string format_double(double x);
// Strict parse of a whole field; throws std::invalid_argument.
double parse_double(const std::string& field);

// Columns u_0..u_{d-1}, y.
void write_cardinal_csv(const std::filesystem::path& path, const CardinalData& data);
CardinalData read_cardinal_csv(const std::filesystem::path& path);

// Columns u_0..u_{d-1}, v_0..v_{d-1}, y with y in {-1, +1}. Identical
// utility rows are merged into one matrix row on read.
void write_ordinal_csv(const std::filesystem::path& path, const OrdinalData& data);
OrdinalData read_ordinal_csv(const std::filesystem::path& path);

nlohmann::json to_json(const GenConfig& cfg);
GenConfig gen_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

struct DatasetMeta {
  GenConfig gen;
  GroundTruth truth;
  std::string kind;  // "cardinal" or "ordinal"
};

// Sidecar path for a dataset: data.csv -> data.json.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);
void write_sidecar(const std::filesystem::path& path, const DatasetMeta& meta);
DatasetMeta read_sidecar(const std::filesystem::path& path);

nlohmann::json model_to_json(const ModelParams& params, TaskKind task);
// Returns the parameters and stores the task tag in *task when non-null.
ModelParams model_from_json(const nlohmann::json& j, TaskKind* task = nullptr);

nlohmann::json to_json(const GridConfig& grid);
GridConfig grid_config_from_json(const nlohmann::json& j, GridConfig base = {});
nlohmann::json to_json(const GDConfig& gd);
GDConfig gd_config_from_json(const nlohmann::json& j, GDConfig base = {});
// Missing keys keep the values of `base`.
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

nlohmann::json report_to_json(const FitReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

std::vector<std::string> metrics_header();
std::string metrics_row_to_csv(const MetricsRow& row);
MetricsRow metrics_row_from_csv(const std::string& line);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

}  // namespace swf
