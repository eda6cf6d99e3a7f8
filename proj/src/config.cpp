// Copyright 2026 The lasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lasr/config.hpp"

#include <algorithm>
#include <sstream>

#include "lasr/error.hpp"
#include "lasr/io.hpp"

namespace lasr::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Ini Ini::parse(const std::string& text) {
  Ini ini;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      check(line.back() == ']', "config: line ", line_no,
            ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    check(eq != std::string::npos, "config: line ", line_no,
          ": expected key=value, got '", line, "'");
    const std::string key = trim(line.substr(0, eq));
    check(!key.empty(), "config: line ", line_no, ": empty key");
    ini.sections[section][key] = trim(line.substr(eq + 1));
  }
  return ini;
}

Ini Ini::parse_file(const std::string& path) {
  return parse(util::read_file(path));
}

bool Ini::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string Ini::get(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string Ini::require(const std::string& section,
                         const std::string& key) const {
  check(has(section, key), "config: missing required key [", section, "] ",
        key);
  return sections.at(section).at(key);
}

int Ini::get_int(const std::string& section, const std::string& key,
                 int fallback) const {
  if (!has(section, key)) return fallback;
  return std::stoi(sections.at(section).at(key));
}

double Ini::get_double(const std::string& section, const std::string& key,
                       double fallback) const {
  if (!has(section, key)) return fallback;
  return std::stod(sections.at(section).at(key));
}

bool Ini::get_bool(const std::string& section, const std::string& key,
                   bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = sections.at(section).at(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail("config: [", section, "] ", key, ": cannot parse '", v, "' as bool");
}

std::vector<int> Ini::get_int_list(const std::string& section,
                                   const std::string& key,
                                   const std::vector<int>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<int> out;
  std::istringstream is(sections.at(section).at(key));
  std::string item;
  while (std::getline(is, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(std::stoi(t));
  }
  return out;
}

void Ini::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  check(eq != std::string::npos, "--set expects section.key=value, got '",
        assignment, "'");
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.rfind('.');
  check(dot != std::string::npos, "--set expects section.key=value, got '",
        assignment, "'");
  sections[path.substr(0, dot)][path.substr(dot + 1)] = value;
}

std::vector<std::string> Ini::numbered_sections(
    const std::string& prefix) const {
  std::vector<std::pair<int, std::string>> matches;
  for (const auto& [name, kv] : sections) {
    if (name.rfind(prefix, 0) != 0) continue;
    const std::string suffix = name.substr(prefix.size());
    check(!suffix.empty() &&
              std::all_of(suffix.begin(), suffix.end(),
                          [](char c) { return c >= '0' && c <= '9'; }),
          "config: section [", name, "] should be ", prefix, "<number>");
    matches.emplace_back(std::stoi(suffix), name);
  }
  std::sort(matches.begin(), matches.end());
  std::vector<std::string> names;
  names.reserve(matches.size());
  for (const auto& [n, name] : matches) names.push_back(name);
  return names;
}

}  // namespace lasr::config
