#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sparsepac/bounds.hpp"
#include "sparsepac/network.hpp"
#include "sparsepac/risk.hpp"
#include "sparsepac/sampler.hpp"
#include "sparsepac/selection.hpp"
#include "sparsepac/verify.hpp"

namespace sparsepac {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

json to_json(const Architecture& arch);
Architecture architecture_from_json(const json& j);

json to_json(const Slab& slab);
Slab slab_from_json(const json& j);

// {"arch": {...}, "active": [[index, value], ...]}; every active coordinate
// is listed, including ones whose value happens to be 0.
json to_json(const SparseParams& params);
SparseParams params_from_json(const json& j);

json to_json(const ChainConfig& cfg);
ChainConfig chain_config_from_json(const json& j);

// Everything needed to continue the run with resume_chain.
json to_json(const ChainResult& result);
ChainResult chain_result_from_json(const json& j);

json to_json(const ThermoEstimate& est);
json to_json(const BoundReport& report);
json to_json(const SelectionResult& result);
json to_json(const Scorecard& card);

// CSV with header x1,...,xd,y. Throws FormatError on malformed files.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path);

// Pretty-printed with a trailing newline. Throws FormatError on failure.
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

void write_params(const std::filesystem::path& path, const SparseParams& params);
SparseParams read_params(const std::filesystem::path& path);

}  // namespace sparsepac
