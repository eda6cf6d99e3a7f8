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

#pragma once

#include <map>
#include <string>
#include <vector>

namespace lasr::config {

// key=value file with [section] headers; '#' and ';' start comments.
struct Ini {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static Ini parse(const std::string& text);
  static Ini parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<int> get_int_list(const std::string& section,
                                const std::string& key,
                                const std::vector<int>& fallback) const;

  // "section.key=value" override (the --set flag).
  void set_override(const std::string& assignment);

  // Section names matching "<prefix>N", sorted by N.
  std::vector<std::string> numbered_sections(const std::string& prefix) const;
};

}  // namespace lasr::config
