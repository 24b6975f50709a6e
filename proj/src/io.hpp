/*
   Copyright 2026 The kgrefine Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */

#ifndef KGREFINE_IO_HPP_
#define KGREFINE_IO_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace kgrefine {

// Writes to a sibling temp file and renames over the target, so readers see
// either the complete file or nothing.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Calls fn(line_number, fields) for every non-empty, non-comment line of a
// tab-separated file. Line numbers are 1-based.
void for_each_tsv_row(const std::filesystem::path& path,
                      const std::function<void(std::size_t, const std::vector<std::string_view>&)>& fn);

std::vector<std::string_view> split_tabs(std::string_view line);

// Strict decimal parse; throws ParseError mentioning `where` on failure.
double parse_double(std::string_view text, std::string_view where);

}  // namespace kgrefine

#endif  // KGREFINE_IO_HPP_
