#include "fbmgen/csvio.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace fbmgen {

std::string format_double(double v) {
	char buf[40];
	auto res = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
	if (!out_) throw std::runtime_error("cannot open " + path);
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
	for (std::size_t i = 0; i < cells.size(); ++i) {
		if (i) out_ << ',';
		out_ << cells[i];
	}
	out_ << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
	for (std::size_t i = 0; i < header.size(); ++i)
		if (header[i] == name) return i;
	throw std::invalid_argument("no column " + name);
}

CsvTable read_csv(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open " + path);
	CsvTable t;
	std::string line;
	bool first = true;
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		std::vector<std::string> cells;
		std::stringstream ss(line);
		std::string cell;
		while (std::getline(ss, cell, ',')) cells.push_back(cell);
		if (first) {
			t.header = std::move(cells);
			first = false;
		} else {
			t.rows.push_back(std::move(cells));
		}
	}
	return t;
}

}  // namespace fbmgen
