// Copyright 2026 The sqlcov Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SQLCOV_FUZZ_REPLAY_H_
#define SQLCOV_FUZZ_REPLAY_H_

#include <string>

#include "sqlcov/fuzz/target.h"
#include "sqlcov/triage/bundle.h"

namespace sqlcov::fuzz {

struct ReplayOutcome {
  bool reproduced = false;
  ExecutionResult result;
  std::string detail;  // one line for the operator
};

// Sends the bundle's input to a freshly started target. A crash reproduces
// the bundle when it hits the same binary with the same stack digest; a
// timeout bundle reproduces on any timeout. The bundle is not modified.
ReplayOutcome Replay(const triage::Bundle& bundle, TargetOptions options);

}  // namespace sqlcov::fuzz

#endif  // SQLCOV_FUZZ_REPLAY_H_
