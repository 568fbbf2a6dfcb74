#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fbmgen {

inline constexpr const char* kToolVersion = "fbmgen 1.0.0";

// Reproducibility record: the merged configuration, derived constants, and a
// content hash per emitted file. Timings are informational and excluded from
// determinism comparisons.
struct RunManifest {
	std::string command;
	std::string config_json;  // serialized merged config
	std::uint64_t master_seed = 0;
	std::vector<std::pair<std::string, double>> constants;
	std::vector<std::pair<std::string, std::string>> outputs;  // file -> sha256
	double wall_seconds = 0.0;

	void add_output(const std::string& path);  // hashes the file
	std::string json() const;
	void write(const std::string& path) const;
};

}  // namespace fbmgen
