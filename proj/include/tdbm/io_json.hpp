#ifndef TDBM_IO_JSON_HPP
#define TDBM_IO_JSON_HPP

#include <json.hpp>
#include <string>

#include "tdbm/features.hpp"
#include "tdbm/lasso.hpp"
#include "tdbm/mapping.hpp"
#include "tdbm/pca.hpp"
#include "tdbm/sim.hpp"

namespace tdbm {

using Json = nlohmann::ordered_json;

// feature vectors: keys f0..f9, absent encoded as null
Json feature_vector_to_json(const FeatureVector& v);
FeatureVector feature_vector_from_json(const Json& j);

Json normalization_to_json(const NormalizationParams& p);
NormalizationParams normalization_from_json(const Json& j);
NormalizationParams load_normalization(const std::string& path);

// map sets: {"behavior": 6x6, "attention": 4x4, "safety": [6]}
Json map_set_to_json(const LinearMapSet& maps);
LinearMapSet map_set_from_json(const Json& j);
LinearMapSet load_map_set(const std::string& path);

Json score_report_to_json(const ScoreReport& r);

Json pca_result_to_json(const PcaResult& p);

// scenario files; `path` anchors relative norm_file references
Scenario scenario_from_json(const Json& j, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

Json trace_to_json(const SimTrace& trace);

// cmd_compare table; one row per run
std::string compare_table_csv(const std::vector<SimTrace>& runs);

// cmd_lasso_path table: response,feature,elimination_log10
std::string lasso_path_csv(const LassoPath& path);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace tdbm

#endif  // TDBM_IO_JSON_HPP
