// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "taskzoo/error.hpp"

namespace taskzoo {
namespace {

void emit(const Json& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      // nlohmann's default object is std::map, so iteration is sorted.
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; matrices print one row per line.
      bool scalar_only = true;
      for (const auto& e : v) scalar_only = scalar_only && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += scalar_only && indent >= 0 ? ", " : ",";
        first = false;
        if (!scalar_only) newline(depth + 1);
        emit(e, indent, depth + 1, out);
      }
      if (!scalar_only) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  std::string s(buf);
  // Keep a float marker so readers do not reinterpret as integer.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump_canonical(const Json& value, int indent) {
  std::string out;
  emit(value, indent, 0, out);
  if (indent >= 0) out += '\n';
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::MalformedFile, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

}  // namespace taskzoo
