// Copyright 2026 The attnspot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATTNSPOT_TOOLS_COMMANDS_H_
#define ATTNSPOT_TOOLS_COMMANDS_H_

namespace attnspot {

// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.
int run_cli(int argc, char** argv);

}  // namespace attnspot

#endif  // ATTNSPOT_TOOLS_COMMANDS_H_
