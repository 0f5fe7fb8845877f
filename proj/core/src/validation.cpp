// SPDX-License-Identifier: Apache-2.0
#include "memorepair/validation.hpp"

#include <algorithm>

namespace memorepair {

OracleLevel oracle_level_from_string(const std::string& s) {
    if (s == "schema_only") return OracleLevel::SchemaOnly;
    if (s == "regression_only") return OracleLevel::RegressionOnly;
    if (s == "full") return OracleLevel::Full;
    throw std::invalid_argument("unknown oracle level: " + s);
}

std::string to_string(OracleLevel level) {
    switch (level) {
        case OracleLevel::SchemaOnly: return "schema_only";
        case OracleLevel::RegressionOnly: return "regression_only";
        case OracleLevel::Full: return "full";
    }
    return "full";
}

ValidationVerdict cascade_precheck(const SuccessorDraft& draft,
                                   const std::set<ArtifactId>& hidden,
                                   const std::set<ArtifactId>& replacement_ids,
                                   const ExampleProvenance& provenance) {
    ValidationVerdict verdict;
    for (const auto& p : draft.declared_parents) {
        if (hidden.count(p) && !replacement_ids.count(p)) {
            verdict.fail("precheck:hidden_parent:" + p);
        }
    }
    if (draft.mode == RepairMode::Param && draft.support) {
        for (const auto& z : draft.support->reference) {
            auto it = provenance.find(z);
            if (it == provenance.end()) continue;  // freshly materialized
            for (const auto& a : it->second) {
                if (hidden.count(a) && !replacement_ids.count(a)) {
                    verdict.fail("precheck:hidden_support:" + z);
                    break;
                }
            }
        }
    }
    return verdict;
}

namespace {

bool schema_applicable(const SuccessorDraft& draft, const FixtureChecks& checks) {
    if (checks.schema_keys.empty()) return false;  // no declared schema
    return draft.mode == RepairMode::Recompute || draft.mode == RepairMode::Regen;
}

void run_schema(const SuccessorDraft& draft, const FixtureChecks& checks,
                ValidationVerdict& verdict) {
    const std::vector<std::string>& rendered =
        draft.rendered_keys.empty() && checks.rendered_keys ? *checks.rendered_keys
                                                            : draft.rendered_keys;
    for (const auto& key : checks.schema_keys) {
        if (std::find(rendered.begin(), rendered.end(), key) == rendered.end()) {
            verdict.fail("schema");
            return;
        }
    }
}

void run_regression(const FixtureChecks& checks, ValidationVerdict& verdict) {
    for (bool ok : checks.probes) {
        if (!ok) {
            verdict.fail("regression");
            return;
        }
    }
}

void run_safety(const SuccessorDraft& draft, const OracleConfig& config,
                const FixtureChecks& checks, ValidationVerdict& verdict) {
    if (!checks.safety_ok) {
        verdict.fail("safety");
        return;
    }
    for (const auto& token : config.blocked_tokens) {
        if (!token.empty() && draft.payload_text.find(token) != std::string::npos) {
            verdict.fail("safety");
            return;
        }
    }
}

void run_sandbox(const OracleConfig& config, const FixtureChecks& checks,
                 ValidationVerdict& verdict) {
    if (!checks.sandbox_ok) {
        verdict.fail("sandbox");
        return;
    }
    if (checks.sandbox_seconds && *checks.sandbox_seconds > config.sandbox_timeout) {
        verdict.fail("sandbox");
    }
}

void run_parametric(const SuccessorDraft& draft, const OracleConfig& config,
                    ValidationVerdict& verdict) {
    if (!draft.param_accuracies) {
        verdict.fail("parametric");
        return;
    }
    double fsp = 100.0 - draft.param_accuracies->first;
    double ru = draft.param_accuracies->second;
    verdict.scores = {fsp, ru};
    if (fsp < config.tau_fsp) verdict.fail("parametric:fsp");
    if (ru < config.tau_ru) verdict.fail("parametric:ru");
}

}  // namespace

ValidationVerdict validate(const SuccessorDraft& draft, const OracleConfig& config,
                           const FixtureChecks& checks) {
    ValidationVerdict verdict;
    bool is_chain = draft.arch && *draft.arch == SkillArch::Chain;

    switch (config.level) {
        case OracleLevel::SchemaOnly:
            if (schema_applicable(draft, checks)) run_schema(draft, checks, verdict);
            return verdict;
        case OracleLevel::RegressionOnly:
            run_regression(checks, verdict);
            return verdict;
        case OracleLevel::Full:
            break;
    }
    if (schema_applicable(draft, checks)) run_schema(draft, checks, verdict);
    run_regression(checks, verdict);
    run_safety(draft, config, checks, verdict);
    if (is_chain) run_sandbox(config, checks, verdict);
    if (draft.mode == RepairMode::Param) run_parametric(draft, config, verdict);
    return verdict;
}

}  // namespace memorepair
