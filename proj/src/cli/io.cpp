#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "resforge/cli/cli.hpp"
#include "resforge/errors.hpp"

namespace resforge::cli {

namespace {

nlohmann::json to_json(const toml::node& node) {
  if (auto* t = node.as_table()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = to_json(value);
    return out;
  }
  if (auto* a = node.as_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& value : *a) out.push_back(to_json(value));
    return out;
  }
  if (auto v = node.value_exact<std::int64_t>()) return *v;
  if (auto v = node.value_exact<double>()) return *v;
  if (auto v = node.value_exact<bool>()) return *v;
  if (auto v = node.value_exact<std::string>()) return *v;
  throw ValidationError("toml", "unsupported value type (dates and times are not accepted)");
}

}  // namespace

nlohmann::json parse_toml(const std::string& text, const std::string& source) {
  try {
    return to_json(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    throw ValidationError(source, std::string(e.description()) + " at line " + std::to_string(b.line) +
                                      ", column " + std::to_string(b.column));
  }
}

nlohmann::json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0) return parse_toml(text, path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Locate the failing byte as line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(path, "malformed JSON at line " + std::to_string(line) + ", column " +
                                    std::to_string(col) + " (" + e.what() + ")");
  }
}

}  // namespace resforge::cli
