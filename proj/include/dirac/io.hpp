#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dirac {

// FNV-1a content hash, used for the run manifest.
std::uint64_t fnv1a_hash(const std::string& bytes);
std::uint64_t fnv1a_hash_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Deterministic numeric formatting (shortest round-trip) for CSV output.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);
    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& cells);
    std::string str() const;
    void save(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace dirac
