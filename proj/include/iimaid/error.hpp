// Copyright 2026 The iimaid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iimaid {

// Global comparison tolerance for probabilities and utilities.
inline constexpr double kTolerance = 1e-9;

// Default cap on the number of pure policies/profiles a solver may enumerate.
inline constexpr double kDefaultSearchCap = 1e7;

enum class ErrorCode {
  kRowNotNormalized,
  kCycleDetected,
  kMissingCpd,
  kDanglingParent,
  kInvalidDomain,
  kDuplicateVariable,
  kUnknownVariable,
  kUnknownOutcome,
  kPartialAssignment,
  kZeroProbabilityEvidence,
  kInvalidModel,
  kMissingRule,
  kUnknownAgent,
  kSearchSpaceTooLarge,
  kNonTopologicalOrder,
  kMissingInfoSetRule,
  kContextMismatch,
  kCyclicBeliefs,
  kDepthContractViolation,
  kNotDepthOne,
  kNotOpenMinded,
  kPerfectRecallViolation,
  kSchemaViolation,
  kUnknownReference,
  kBadFlag,
  kFileNotFound,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRowNotNormalized: return "row-not-normalized";
    case ErrorCode::kCycleDetected: return "cycle-detected";
    case ErrorCode::kMissingCpd: return "missing-cpd";
    case ErrorCode::kDanglingParent: return "dangling-parent";
    case ErrorCode::kInvalidDomain: return "invalid-domain";
    case ErrorCode::kDuplicateVariable: return "duplicate-variable";
    case ErrorCode::kUnknownVariable: return "unknown-variable";
    case ErrorCode::kUnknownOutcome: return "unknown-outcome";
    case ErrorCode::kPartialAssignment: return "partial-assignment";
    case ErrorCode::kZeroProbabilityEvidence: return "zero-probability-evidence";
    case ErrorCode::kInvalidModel: return "invalid-model";
    case ErrorCode::kMissingRule: return "missing-rule";
    case ErrorCode::kUnknownAgent: return "unknown-agent";
    case ErrorCode::kSearchSpaceTooLarge: return "search-space-too-large";
    case ErrorCode::kNonTopologicalOrder: return "non-topological-order";
    case ErrorCode::kMissingInfoSetRule: return "missing-info-set-rule";
    case ErrorCode::kContextMismatch: return "context-mismatch";
    case ErrorCode::kCyclicBeliefs: return "cyclic-beliefs";
    case ErrorCode::kDepthContractViolation: return "depth-contract-violation";
    case ErrorCode::kNotDepthOne: return "not-depth-1";
    case ErrorCode::kNotOpenMinded: return "not-open-minded";
    case ErrorCode::kPerfectRecallViolation: return "perfect-recall-violation";
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kUnknownReference: return "unknown-reference";
    case ErrorCode::kBadFlag: return "bad-flag";
    case ErrorCode::kFileNotFound: return "file-not-found";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iimaid
