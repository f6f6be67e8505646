// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/templates.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <regex>
#include <set>

#include "pgt/error.hpp"

namespace pgt {

namespace {

// User-turn text of the published prompt templates, byte for byte,
// including their typos ("closes to", "[rel_B] box", "[color_A] box" twice).
constexpr std::string_view kSpatialA =
    "Where is the [color_A] box relative to the [rel_B] box? Answer with [rel_A] or [rel_B].";
constexpr std::string_view kSpatialB =
    "Based on the image, is this statement True or False? The [color_A] box is [rel_A] of "
    "[color_B] box? Answer with True or False directly.";
constexpr std::string_view kSpatialC =
    "Considering the relative positions of the [color_A] box and the [color_B] box in the image "
    "provided, where is the [color_A] box  located with respect to the [color_A] box? Select "
    "from the following choices. (A) [rel_A]  (B) [rel_B]";
constexpr std::string_view kCountingA =
    "How many [color] overlay circles are there? Answer with the number directly";
constexpr std::string_view kCountingB =
    "How many [color] overlay circles are there? (A) [option_A] (B) [option_B] (C) [option_C] "
    "Answer with the option's letter from the given choices directly";
constexpr std::string_view kDistance =
    "There are four colored circles labeled A, B, C, D in this image. Which one is closes to "
    "[target_letter] : [option_A], [option_B], or [option_C] ?";
constexpr std::string_view kAnalogy =
    "What is the letter of the circle that has the same color as the circle with a "
    "[target_letter] in it ?";

// Not published: a repaired Template A (disabled by default) and the
// coordinate-regression prompt, which has no published wording.
constexpr std::string_view kSpatialACorrected =
    "Where is the [color_A] box relative to the [color_B] box? Answer with [rel_A] or [rel_B].";
constexpr std::string_view kCoordinates =
    "What are the normalized center coordinates (x, y) of the [color] box? Answer as (x.xx, y.yy).";

std::string option_slot(std::size_t i) { return std::string("option_") + static_cast<char>('A' + i); }

std::set<std::string> provided_slots(Subtask s) {
    switch (s) {
        case Subtask::RelativePositioning: return {"color_A", "color_B", "rel_A", "rel_B"};
        case Subtask::CoordinateRegression: return {"color"};
        case Subtask::CountColor: return {"color", "option_A", "option_B", "option_C"};
        case Subtask::ClosestPoint: {
            std::set<std::string> out{"target_letter"};
            for (std::size_t i = 0; i < 25; ++i) out.insert(option_slot(i));
            return out;
        }
        case Subtask::ColorAnalogy: return {"target_letter"};
    }
    return {};
}

bool rule_allowed(Subtask s, AnswerKind kind, AnswerRule rule) {
    switch (s) {
        case Subtask::RelativePositioning:
            return (rule == AnswerRule::RelationWord && kind != AnswerKind::TrueFalse) ||
                   (rule == AnswerRule::TrueFalse && kind == AnswerKind::TrueFalse);
        case Subtask::CoordinateRegression:
            return rule == AnswerRule::Coordinates && kind == AnswerKind::FreeForm;
        case Subtask::CountColor:
            return (rule == AnswerRule::Numeral && kind == AnswerKind::FreeForm) ||
                   (rule == AnswerRule::OptionLetter && kind == AnswerKind::MultipleChoice);
        case Subtask::ClosestPoint:
        case Subtask::ColorAnalogy:
            return rule == AnswerRule::LabelLetter && kind != AnswerKind::TrueFalse;
    }
    return false;
}

std::string letter(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

template <typename T>
const T& truth_as(const TaskInstance& instance) {
    const auto* t = std::get_if<T>(&instance.truth);
    if (!t) throw ContractError("task instance truth does not match its sub-task");
    return *t;
}

}  // namespace

std::string_view to_string(AnswerKind k) {
    switch (k) {
        case AnswerKind::FreeForm: return "free_form";
        case AnswerKind::MultipleChoice: return "multiple_choice";
        case AnswerKind::TrueFalse: return "true_false";
    }
    return "?";
}

std::string_view to_string(AnswerRule r) {
    switch (r) {
        case AnswerRule::RelationWord: return "relation_word";
        case AnswerRule::TrueFalse: return "true_false";
        case AnswerRule::Coordinates: return "coordinates";
        case AnswerRule::Numeral: return "numeral";
        case AnswerRule::OptionLetter: return "option_letter";
        case AnswerRule::LabelLetter: return "label_letter";
    }
    return "?";
}

std::optional<AnswerKind> answer_kind_from_string(std::string_view s) {
    for (auto k : {AnswerKind::FreeForm, AnswerKind::MultipleChoice, AnswerKind::TrueFalse})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

std::optional<AnswerRule> answer_rule_from_string(std::string_view s) {
    for (auto r : {AnswerRule::RelationWord, AnswerRule::TrueFalse, AnswerRule::Coordinates,
                   AnswerRule::Numeral, AnswerRule::OptionLetter, AnswerRule::LabelLetter})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

std::vector<std::string> PromptTemplate::slots() const {
    static const std::regex slot_re(R"(\[([A-Za-z_][A-Za-z0-9_]*)\])");
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(pattern.begin(), pattern.end(), slot_re);
         it != std::sregex_iterator(); ++it) {
        const std::string name = (*it)[1];
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

std::string fill_slots(std::string_view pattern, const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(pattern.size() + 32);
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '[') {
            const auto close = pattern.find(']', i + 1);
            if (close != std::string_view::npos) {
                const std::string name(pattern.substr(i + 1, close - i - 1));
                const bool is_slot = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                });
                if (is_slot) {
                    const auto it = slots.find(name);
                    if (it == slots.end()) throw ContractError("template slot [" + name + "] has no value");
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(pattern[i]);
        ++i;
    }
    return out;
}

std::string format_coordinates(NormPoint p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.2f, %.2f)", p.x, p.y);
    return buf;
}

TemplateRegistry TemplateRegistry::builtin() {
    TemplateRegistry reg;
    const auto builtin = [&](std::string id, Subtask s, std::string_view pattern, AnswerKind k, AnswerRule r) {
        reg.templates_.push_back({std::move(id), s, std::string(pattern), k, r, true, true});
    };
    builtin("spatial.A", Subtask::RelativePositioning, kSpatialA, AnswerKind::FreeForm, AnswerRule::RelationWord);
    builtin("spatial.B", Subtask::RelativePositioning, kSpatialB, AnswerKind::TrueFalse, AnswerRule::TrueFalse);
    builtin("spatial.C", Subtask::RelativePositioning, kSpatialC, AnswerKind::MultipleChoice,
            AnswerRule::RelationWord);
    builtin("counting.A", Subtask::CountColor, kCountingA, AnswerKind::FreeForm, AnswerRule::Numeral);
    builtin("counting.B", Subtask::CountColor, kCountingB, AnswerKind::MultipleChoice, AnswerRule::OptionLetter);
    builtin("distance.closest", Subtask::ClosestPoint, kDistance, AnswerKind::MultipleChoice, AnswerRule::LabelLetter);
    builtin("distance.analogy", Subtask::ColorAnalogy, kAnalogy, AnswerKind::FreeForm, AnswerRule::LabelLetter);
    reg.templates_.push_back({"spatial.A.corrected", Subtask::RelativePositioning,
                              std::string(kSpatialACorrected), AnswerKind::FreeForm,
                              AnswerRule::RelationWord, false, false});
    reg.templates_.push_back({"spatial.coords", Subtask::CoordinateRegression, std::string(kCoordinates),
                              AnswerKind::FreeForm, AnswerRule::Coordinates, false, true});
    return reg;
}

void TemplateRegistry::add(PromptTemplate t) {
    if (t.id.empty()) throw ConfigError("template id must not be empty");
    if (find(t.id)) throw ConfigError("template id '" + t.id + "' is already registered");
    if (t.verbatim) throw ConfigError("template '" + t.id + "': only built-in templates may be marked verbatim");
    if (!rule_allowed(t.subtask, t.kind, t.rule))
        throw ConfigError("template '" + t.id + "': answer rule " + std::string(to_string(t.rule)) +
                          " with kind " + std::string(to_string(t.kind)) + " is not valid for " +
                          std::string(to_string(t.subtask)));
    const auto allowed = provided_slots(t.subtask);
    for (const auto& slot : t.slots())
        if (!allowed.contains(slot))
            throw ConfigError("template '" + t.id + "': slot [" + slot + "] is not provided for " +
                              std::string(to_string(t.subtask)));
    templates_.push_back(std::move(t));
}

void TemplateRegistry::set_enabled(std::string_view id, bool enabled) {
    for (auto& t : templates_)
        if (t.id == id) {
            t.enabled = enabled;
            return;
        }
    throw ConfigError("unknown template id '" + std::string(id) + "'");
}

void TemplateRegistry::apply_config(const nlohmann::json& config) {
    if (!config.is_object()) throw ConfigError("templates config must be an object");
    for (const auto& [key, _] : config.items())
        if (key != "add" && key != "enable" && key != "disable")
            throw ConfigError("templates config: unknown key '" + key + "'");
    try {
        for (const auto& entry : config.value("add", nlohmann::json::array())) {
            const auto subtask = subtask_from_string(entry.at("subtask").get<std::string>());
            const auto kind = answer_kind_from_string(entry.at("answer_kind").get<std::string>());
            const auto rule = answer_rule_from_string(entry.at("answer_rule").get<std::string>());
            if (!subtask || !kind || !rule)
                throw ConfigError("templates config: unknown subtask, answer_kind or answer_rule in '" +
                                  entry.value("id", std::string{}) + "'");
            add({entry.at("id").get<std::string>(), *subtask, entry.at("pattern").get<std::string>(),
                 *kind, *rule, false, entry.value("enabled", true)});
        }
        for (const auto& id : config.value("enable", nlohmann::json::array()))
            set_enabled(id.get<std::string>(), true);
        for (const auto& id : config.value("disable", nlohmann::json::array()))
            set_enabled(id.get<std::string>(), false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("templates config: ") + e.what());
    }
}

const PromptTemplate* TemplateRegistry::find(std::string_view id) const {
    for (const auto& t : templates_)
        if (t.id == id) return &t;
    return nullptr;
}

std::vector<const PromptTemplate*> TemplateRegistry::eligible(Subtask subtask) const {
    std::vector<const PromptTemplate*> out;
    for (const auto& t : templates_)
        if (t.enabled && t.subtask == subtask) out.push_back(&t);
    return out;
}

const PromptTemplate& TemplateRegistry::pick(Subtask subtask, Rng& rng) const {
    const auto pool = eligible(subtask);
    if (pool.empty())
        throw ConfigError("no enabled template for sub-task " + std::string(to_string(subtask)));
    return *pool[rng.below(pool.size())];
}

std::map<std::string, std::string> TemplateRegistry::patterns() const {
    std::map<std::string, std::string> out;
    for (const auto& t : templates_) out.emplace(t.id, t.pattern);
    return out;
}

QAPair instantiate(const PromptTemplate& tmpl, const TaskInstance& instance, Rng& rng,
                   const InstantiateOptions& options) {
    if (tmpl.subtask != instance.subtask)
        throw ContractError("template '" + tmpl.id + "' is for " + std::string(to_string(tmpl.subtask)) +
                            ", instance is " + std::string(to_string(instance.subtask)));
    QAPair qa;
    qa.template_id = tmpl.id;
    auto& slots = qa.slots;

    switch (instance.subtask) {
        case Subtask::RelativePositioning: {
            const auto& t = truth_as<RelationTruth>(instance);
            slots["color_A"] = to_string(t.a_color);
            slots["color_B"] = to_string(t.b_color);
            const std::string truth_word(to_string(t.rel));
            const std::string other_word(to_string(opposite(t.rel)));
            if (tmpl.rule == AnswerRule::TrueFalse) {
                const bool state_truth = rng.below(2) == 0;
                const Relation stated = state_truth ? t.rel : opposite(t.rel);
                slots["rel_A"] = to_string(stated);
                slots["rel_B"] = to_string(opposite(stated));
                qa.answer = state_truth ? "True" : "False";
            } else if (tmpl.kind == AnswerKind::MultipleChoice) {
                qa.options = rng.below(2) == 0 ? std::vector{truth_word, other_word}
                                               : std::vector{other_word, truth_word};
                slots["rel_A"] = qa.options[0];
                slots["rel_B"] = qa.options[1];
                qa.answer = truth_word;
            } else {
                slots["rel_A"] = truth_word;
                slots["rel_B"] = other_word;
                qa.answer = truth_word;
            }
            break;
        }
        case Subtask::CoordinateRegression: {
            const auto& t = truth_as<CenterTruth>(instance);
            slots["color"] = to_string(t.color);
            qa.answer = format_coordinates(t.point);
            break;
        }
        case Subtask::CountColor: {
            const auto& t = truth_as<CountTruth>(instance);
            slots["color"] = to_string(t.target_color);
            if (tmpl.rule == AnswerRule::OptionLetter) {
                std::vector<int> decoys;
                for (int v = options.count_min; v <= options.count_max; ++v)
                    if (v != t.count) decoys.push_back(v);
                if (decoys.size() < 2) throw ContractError("count range too small for two decoys");
                std::vector<int> values{t.count};
                for (int i = 0; i < 2; ++i) {
                    const auto j = static_cast<std::size_t>(rng.below(decoys.size()));
                    values.push_back(decoys[j]);
                    decoys.erase(decoys.begin() + static_cast<std::ptrdiff_t>(j));
                }
                rng.shuffle(values);
                for (std::size_t i = 0; i < values.size(); ++i) {
                    qa.options.push_back(std::to_string(values[i]));
                    slots[option_slot(i)] = qa.options.back();
                    if (values[i] == t.count) qa.answer = letter(i);
                }
            } else {
                qa.answer = std::to_string(t.count);
            }
            break;
        }
        case Subtask::ClosestPoint: {
            const auto& t = truth_as<ClosestTruth>(instance);
            slots["target_letter"] = std::string(1, t.target_label);
            for (std::size_t i = 0; i < t.candidate_labels.size(); ++i) {
                qa.options.emplace_back(1, t.candidate_labels[i]);
                slots[option_slot(i)] = qa.options.back();
            }
            qa.answer = std::string(1, t.answer_label);
            break;
        }
        case Subtask::ColorAnalogy: {
            const auto& t = truth_as<AnalogyTruth>(instance);
            slots["target_letter"] = std::string(1, t.query_label);
            qa.answer = std::string(1, t.answer_label);
            break;
        }
    }
    qa.question = fill_slots(tmpl.pattern, slots);
    return qa;
}

bool validate_answer_format(const QAPair& qa, const PromptTemplate& tmpl) {
    const auto& a = qa.answer;
    if (a.empty()) return false;
    const bool single_capital = a.size() == 1 && a[0] >= 'A' && a[0] <= 'Z';
    switch (tmpl.kind) {
        case AnswerKind::TrueFalse: return a == "True" || a == "False";
        case AnswerKind::MultipleChoice:
            if (tmpl.rule == AnswerRule::OptionLetter)
                return single_capital && static_cast<std::size_t>(a[0] - 'A') < qa.options.size();
            if (tmpl.rule == AnswerRule::LabelLetter)
                return std::find(qa.options.begin(), qa.options.end(), a) != qa.options.end() &&
                       single_capital;
            return std::find(qa.options.begin(), qa.options.end(), a) != qa.options.end();
        case AnswerKind::FreeForm: break;
    }
    switch (tmpl.rule) {
        case AnswerRule::RelationWord: return relation_from_string(a).has_value();
        case AnswerRule::Coordinates: {
            static const std::regex coords(R"(^\([01]\.[0-9]{2}, [01]\.[0-9]{2}\)$)");
            return std::regex_match(a, coords);
        }
        case AnswerRule::Numeral:
            return std::all_of(a.begin(), a.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
                   (a.size() == 1 || a[0] != '0');
        case AnswerRule::LabelLetter: return single_capital;
        case AnswerRule::TrueFalse: return a == "True" || a == "False";
        case AnswerRule::OptionLetter:
            return single_capital && static_cast<std::size_t>(a[0] - 'A') < qa.options.size();
    }
    return false;
}

}  // namespace pgt
