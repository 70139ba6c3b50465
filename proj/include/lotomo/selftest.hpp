/*
 * Copyright 2026 The lotomo Authors
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


#pragma once

#include <string>
#include <vector>

namespace lotomo::selftest {

struct Check {
    std::string module;
    std::string invariant;
    bool passed = false;
    std::string detail;

    std::string id() const { return module + "/" + invariant; }
};

struct Report {
    std::vector<Check> checks;

    bool all_passed() const;
    std::vector<Check> failures() const;
};

/// Cross-module invariants at desk scale (N <= 4, M <= 4). Uses the active
/// kernel table, so an overridden kernel is what gets checked.
Report run_all();

} // namespace lotomo::selftest
