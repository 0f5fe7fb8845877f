// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace memorepair {

// Opaque artifact identifier. Never reused: a republished successor gets a
// fresh id, the original id stays withdrawn.
using ArtifactId = std::string;

enum class ArtifactKind { Record, Cache, Summary, Skill };
enum class SkillArch { Neural, Prompt, Chain };

// Lifecycle flag kept for audit; artifacts are never physically deleted.
enum class ArtifactState { Active, Withdrawn, Removed, Quarantined };

enum class EventType { Delete, Correct, Migrate };
enum class RepairMode { Remove, Recompute, Regen, Param };

struct Artifact {
    ArtifactId id;
    ArtifactKind kind = ArtifactKind::Record;
    std::optional<SkillArch> arch;  // present iff kind == Skill
    int version = 1;
    std::string payload_digest;
    std::optional<ArtifactId> replaces;  // successor -> withdrawn predecessor
    ArtifactState state = ArtifactState::Active;
};

std::string to_string(ArtifactKind k);
std::string to_string(SkillArch a);
std::string to_string(ArtifactState s);
std::string to_string(EventType t);
std::string to_string(RepairMode m);

ArtifactKind kind_from_string(const std::string& s);
SkillArch arch_from_string(const std::string& s);
ArtifactState state_from_string(const std::string& s);
EventType event_type_from_string(const std::string& s);
RepairMode mode_from_string(const std::string& s);

}  // namespace memorepair
