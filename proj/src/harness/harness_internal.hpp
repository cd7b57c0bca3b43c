/* Copyright 2026 The plc-gauntlet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */
#pragma once

#include "plcg/harness.hpp"

namespace plcg::harness {

/// Lower-case alphanumerics, everything else '_'; used for file names.
std::string slug(const std::string& s);
nlohmann::json lp_list(const diff::CandidateSet& c);
nlohmann::json encodings_json(const std::vector<Encoding>& encs);
std::vector<wire::RequestKind> kinds_for(plcsim::Manipulation m);

}  // namespace plcg::harness
