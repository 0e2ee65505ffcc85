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

#include "sqlcov/fuzz/replay.h"

namespace sqlcov::fuzz {

ReplayOutcome Replay(const triage::Bundle& bundle, TargetOptions options) {
  if (bundle.statements.empty()) throw triage::BundleError("bundle has no statements");
  ReplayOutcome out;
  TargetSession target(std::move(options));
  target.Start();
  out.result = target.Evaluate(bundle.statements);
  target.Stop();

  const bool timeout_bundle = bundle.kind == triage::AnomalyKindName(triage::AnomalyKind::kTimeout);
  for (const auto& event : out.result.anomalies) {
    if (timeout_bundle) {
      if (event.kind == triage::AnomalyKind::kTimeout) out.reproduced = true;
    } else if (event.kind == triage::AnomalyKind::kCrash && event.binary_id == bundle.binary_id &&
               triage::StackDigest(event.stack) == bundle.key.stack_digest) {
      out.reproduced = true;
    }
  }
  if (out.reproduced) {
    out.detail = "reproduced: " + bundle.binary_id + " " +
                 (timeout_bundle ? std::string("timed out") : triage::SignalName(bundle.signal));
  } else if (!out.result.anomalies.empty()) {
    const auto& e = out.result.anomalies.front();
    out.detail = "not reproduced: a different " + std::string(triage::AnomalyKindName(e.kind)) +
                 " in " + e.binary_id;
  } else {
    out.detail = "not reproduced: " + std::string(ExecutionStatusName(out.result.status)) +
                 " after " + std::to_string(out.result.replies.size()) + " statements";
  }
  return out;
}

}  // namespace sqlcov::fuzz
