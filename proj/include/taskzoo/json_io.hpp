// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace taskzoo {

using Json = nlohmann::json;

// Sorted keys, floats with 17 significant digits. Identical inputs give
// byte-identical text.
std::string dump_canonical(const Json& value, int indent = 2);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// "%.17g" formatting used by the CSV writers as well.
std::string format_double(double value);

}  // namespace taskzoo
