#include "fbmgen/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fbmgen/hash.hpp"

namespace fbmgen {

void RunManifest::add_output(const std::string& path) {
	outputs.emplace_back(path, sha256_file(path));
}

std::string RunManifest::json() const {
	nlohmann::ordered_json j;
	j["tool_version"] = kToolVersion;
	j["command"] = command;
	j["master_seed"] = master_seed;
	if (!config_json.empty())
		j["config"] = nlohmann::ordered_json::parse(config_json);
	nlohmann::ordered_json consts;
	for (const auto& [k, v] : constants) consts[k] = v;
	j["constants"] = consts;
	nlohmann::ordered_json outs = nlohmann::ordered_json::array();
	for (const auto& [file, hash] : outputs)
		outs.push_back({{"file", file}, {"sha256", hash}});
	j["outputs"] = outs;
	j["wall_seconds"] = wall_seconds;
	return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot open " + path);
	out << json();
}

}  // namespace fbmgen
