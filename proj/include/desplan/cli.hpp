/*
 * Copyright 2026 The desplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DESPLAN_CLI_HPP
#define DESPLAN_CLI_HPP

#include <iosfwd>
#include <string_view>
#include <vector>

namespace desplan {

/// Entry point of the `desplan` tool. Returns the process exit status:
/// 0 iff the requested artifact was fully produced.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "a..b" (integer steps) or a comma-separated list. Throws InputError.
std::vector<double> parse_sigma_list(std::string_view text);

} // namespace desplan

#endif // DESPLAN_CLI_HPP
