// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pgt/rng.hpp"
#include "pgt/tasks.hpp"

namespace pgt {

enum class AnswerKind : std::uint8_t { FreeForm, MultipleChoice, TrueFalse };

/// How the answer string is derived from the ground truth.
enum class AnswerRule : std::uint8_t {
    RelationWord,  ///< "left" / "right" / "above" / "below"
    TrueFalse,     ///< "True" / "False" for a stated relation
    Coordinates,   ///< "(0.xx, 0.yy)"
    Numeral,       ///< decimal count
    OptionLetter,  ///< letter of the option holding the true count
    LabelLetter,   ///< letter of a labeled circle
};

std::string_view to_string(AnswerKind k);
std::string_view to_string(AnswerRule r);
std::optional<AnswerKind> answer_kind_from_string(std::string_view s);
std::optional<AnswerRule> answer_rule_from_string(std::string_view s);

struct PromptTemplate {
    std::string id;
    Subtask subtask;
    /// User-turn text with [slot] placeholders.
    std::string pattern;
    AnswerKind kind;
    AnswerRule rule;
    bool verbatim = false;
    bool enabled = true;

    TaskFamily family() const { return family_of(subtask); }
    /// Slot names in order of first appearance.
    std::vector<std::string> slots() const;
};

struct QAPair {
    std::string question;
    std::string answer;
    std::string template_id;
    /// Rendered choices in display order (empty for free-form questions).
    std::vector<std::string> options;
    std::map<std::string, std::string> slots;
};

/// Replaces every [name] in `pattern`; throws ContractError on an unfilled slot.
std::string fill_slots(std::string_view pattern, const std::map<std::string, std::string>& slots);

/// "(x.xx, y.yy)" with two decimals.
std::string format_coordinates(NormPoint p);

/// The built-in templates plus any loaded from configuration. Built-in
/// templates cannot be replaced, only enabled or disabled.
class TemplateRegistry {
public:
    static TemplateRegistry builtin();

    /// Applies {"add": [...], "enable": [ids], "disable": [ids]}. Throws ConfigError.
    void apply_config(const nlohmann::json& config);

    /// Throws ConfigError on duplicate ids, unknown slots, or a rule the sub-task cannot answer.
    void add(PromptTemplate t);
    void set_enabled(std::string_view id, bool enabled);

    const PromptTemplate* find(std::string_view id) const;
    std::vector<const PromptTemplate*> eligible(Subtask subtask) const;

    /// Uniform over the enabled templates for `subtask`; one draw. Throws ConfigError if none.
    const PromptTemplate& pick(Subtask subtask, Rng& rng) const;

    const std::vector<PromptTemplate>& all() const { return templates_; }

    /// id -> pattern for every registered template.
    std::map<std::string, std::string> patterns() const;

private:
    std::vector<PromptTemplate> templates_;
};

struct InstantiateOptions {
    /// Decoy counts for multiple-choice counting are drawn from this range.
    int count_min = 1;
    int count_max = 6;
};

/// Fills `tmpl` from `instance`. Throws ContractError when the template's
/// sub-task does not match the instance.
QAPair instantiate(const PromptTemplate& tmpl, const TaskInstance& instance, Rng& rng,
                   const InstantiateOptions& options = {});

/// True iff the answer has the shape demanded by the template's kind and rule.
bool validate_answer_format(const QAPair& qa, const PromptTemplate& tmpl);

}  // namespace pgt
