#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rubs::detail {

// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::string& path, const std::vector<unsigned char>& bytes);
std::vector<unsigned char> read_file(const std::string& path);

void put_u32(std::vector<unsigned char>& out, std::uint32_t v);
void put_f64(std::vector<unsigned char>& out, double v);
std::uint32_t get_u32(const unsigned char* p);
double get_f64(const unsigned char* p);

}  // namespace rubs::detail
