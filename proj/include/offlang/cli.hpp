/*
 * Copyright (C) 2026 The offlang Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Exit codes: 0 success, 1 usage or validation
// error, 2 runtime failure.

#ifndef OFFLANG_CLI_HPP_
#define OFFLANG_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace offlang {

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Directory holding the bundled lexicon, variant and leet tables.
std::string DefaultDataDir();

}  // namespace offlang

#endif  // OFFLANG_CLI_HPP_
