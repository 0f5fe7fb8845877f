// SPDX-License-Identifier: Apache-2.0
#pragma once
// Successor validation oracle.
//
// Checks are fixture-scripted at desk scale: the scenario bundle carries the
// declared schema keys, probe outcomes, safety/sandbox results, and
// parametric accuracies each target would produce. Acceptance rests on the
// contract behavior of the oracle, not on model quality.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memorepair/candidate.hpp"
#include "memorepair/types.hpp"

namespace memorepair {

enum class OracleLevel { SchemaOnly, RegressionOnly, Full };

OracleLevel oracle_level_from_string(const std::string& s);
std::string to_string(OracleLevel level);

struct OracleConfig {
    OracleLevel level = OracleLevel::Full;
    double tau_fsp = 80;  // forget-set suppression threshold
    double tau_ru = 80;   // retained-utility threshold
    std::set<std::string> blocked_tokens;
    double sandbox_timeout = 5.0;  // seconds
};

struct ValidationVerdict {
    bool pass = true;
    std::vector<std::string> failed_checks;
    std::optional<std::pair<double, double>> scores;  // (FSP, RU) for param drafts

    void fail(const std::string& check) {
        pass = false;
        failed_checks.push_back(check);
    }
};

// Staged successor awaiting validation and batch publication.
struct SuccessorDraft {
    ArtifactId id;  // fresh, never the target id
    ArtifactId target;
    ArtifactKind kind = ArtifactKind::Record;
    std::optional<SkillArch> arch;
    RepairMode mode = RepairMode::Recompute;
    std::string payload_digest;
    std::string payload_text;
    std::set<ArtifactId> declared_parents;
    std::vector<std::string> rendered_keys;
    std::optional<SupportPartition> support;
    std::optional<std::pair<double, double>> param_accuracies;  // (a_F, a_R)
};

// Rejects drafts whose declared parents intersect the still-hidden cascade
// (correction replacements exempt) and param drafts whose reference support
// provenance touches a hidden artifact.
ValidationVerdict cascade_precheck(const SuccessorDraft& draft,
                                   const std::set<ArtifactId>& hidden,
                                   const std::set<ArtifactId>& replacement_ids,
                                   const ExampleProvenance& provenance);

// Applicable checks by mode/kind; the configured level restricts which check
// family runs. Full requires every applicable check to pass.
ValidationVerdict validate(const SuccessorDraft& draft, const OracleConfig& config,
                           const FixtureChecks& checks);

}  // namespace memorepair
