#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fbmgen {

// shortest round-trip decimal representation
std::string format_double(double v);

class CsvWriter {
public:
	explicit CsvWriter(const std::string& path);
	void header(const std::vector<std::string>& names);
	void row(const std::vector<std::string>& cells);
	static std::string cell(double v) { return format_double(v); }

private:
	std::ofstream out_;
};

struct CsvTable {
	std::vector<std::string> header;
	std::vector<std::vector<std::string>> rows;
	std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace fbmgen
