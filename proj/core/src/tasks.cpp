#include "cogload/tasks.hpp"

#include <algorithm>

#include "cogload/errors.hpp"
#include "cogload/numberwords.hpp"
#include "cogload/templates.hpp"
#include "cogload/text.hpp"

namespace cogload::prompt {

std::string_view to_string(TaskId id) {
    switch (id) {
        case TaskId::T1RemoveInstruction: return "T1";
        case TaskId::T2ReverseInstruction: return "T2";
        case TaskId::T3UserInstruction: return "T3";
        case TaskId::T4NumbersRange: return "T4";
        case TaskId::T5Multiplication: return "T5";
        case TaskId::T6ReverseAnswer: return "T6";
        case TaskId::T7Answer: return "T7";
        case TaskId::ReversePoem: return "ReversePoem";
        case TaskId::SongReverse: return "SongReverse";
        case TaskId::FirstWordPerLine: return "FirstWordPerLine";
        case TaskId::MultiplyRange: return "MultiplyRange";
        case TaskId::NumbersReverseRange: return "NumbersReverseRange";
        case TaskId::NumbersForeignReverse: return "NumbersForeignReverse";
        case TaskId::ReverseAnswer: return "ReverseAnswer";
        case TaskId::Answer: return "Answer";
    }
    return "?";
}

bool is_answer_task(TaskId id) {
    return id == TaskId::T7Answer || id == TaskId::Answer ||
           id == TaskId::ReverseAnswer;
}

std::string_view to_string(LevelId id) {
    static const char* names[] = {"CL0", "CL1", "CL2",  "CL3",  "CL4", "CL5",
                                  "CL6", "CL7", "CL8",  "CL9",  "CL10", "CL11"};
    return names[static_cast<int>(id)];
}

LevelId level_from_string(const std::string& name) {
    for (LevelId id : all_levels()) {
        if (name == to_string(id)) return id;
    }
    raise(ErrorCode::UnknownLevel, "no such load level: " + name);
}

int level_index(LevelId id) { return static_cast<int>(id); }

std::vector<LevelId> all_levels() {
    std::vector<LevelId> out;
    for (int i = 0; i <= 11; ++i) out.push_back(static_cast<LevelId>(i));
    return out;
}

std::string LoadLevel::label() const {
    return custom_label.empty() ? std::string(to_string(id)) : custom_label;
}

std::vector<std::string> LoadLevel::output_labels() const {
    std::vector<std::string> out;
    out.reserve(tasks.size());
    for (const auto& task : tasks) out.push_back(task.output_label);
    return out;
}

bool LoadLevel::ends_with_reverse_answer() const {
    return !tasks.empty() && tasks.back().id == TaskId::ReverseAnswer;
}

const std::string& LoadLevel::answer_label() const {
    if (tasks.empty()) raise(ErrorCode::UnknownLevel, "level has no tasks");
    return tasks.back().output_label;
}

std::vector<TaskSpec> LoadLevel::load_tasks() const {
    if (tasks.empty()) return {};
    return std::vector<TaskSpec>(tasks.begin(), tasks.end() - 1);
}

namespace {

std::string param_or(const std::map<std::string, std::string>& params,
                     const std::string& key, const std::string& fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::string descending_number_list(long long from, long long to) {
    std::vector<std::string> parts;
    for (long long n = from; n >= to; --n) parts.push_back(std::to_string(n));
    return text::join(parts, ", ");
}

// Builds one TaskSpec with its instruction template resolved against the
// level params.
TaskSpec make_task(TaskId id, const std::map<std::string, std::string>& params) {
    const TemplateStore& store = TemplateStore::instance();
    TaskSpec task;
    task.id = id;
    task.params = params;

    auto fill = [&](const std::string& key,
                    std::map<std::string, std::string> values) {
        return fill_placeholders(store.get(key), values);
    };

    switch (id) {
        case TaskId::T1RemoveInstruction:
            task.output_label = "remove_instruction";
            task.instruction_template = store.get("tasks/remove_instruction");
            break;
        case TaskId::T2ReverseInstruction:
            task.output_label = "reverse_instruction";
            task.instruction_template = store.get("tasks/reverse_instruction");
            break;
        case TaskId::T3UserInstruction:
            task.output_label = "user_instruction";
            // OPEN_TAG / CLOSE_TAG are bound at render time.
            task.instruction_template = store.get("tasks/user_instruction");
            break;
        case TaskId::T4NumbersRange: {
            long long bound = std::stoll(param_or(params, "range_bound", "20"));
            task.output_label = "numbers";
            task.instruction_template =
                fill("tasks/numbers", {{"FROM", std::to_string(-bound)},
                                       {"TO", std::to_string(bound)}});
            break;
        }
        case TaskId::T5Multiplication: {
            std::string multiplier = param_or(params, "multiplier", "13");
            task.output_label = "multiplication";
            task.instruction_template =
                fill("tasks/multiplication",
                     {{"MULTIPLIER", multiplier},
                      {"FROM", param_or(params, "mult_from", "1")},
                      {"TO", param_or(params, "mult_to", "10")}});
            break;
        }
        case TaskId::T6ReverseAnswer:
            task.output_label = "reverse_answer";
            task.instruction_template = store.get("tasks/reverse_answer");
            break;
        case TaskId::T7Answer:
            task.output_label = "answer";
            task.instruction_template = store.get("tasks/answer");
            break;
        case TaskId::ReversePoem:
            task.output_label = "reverse_poem";
            task.instruction_template =
                fill("tasks/reverse_poem",
                     {{"POEM_LINES", param_or(params, "poem_lines", "10")}});
            break;
        case TaskId::SongReverse:
            task.output_label = "reverse_song";
            task.instruction_template = store.get("tasks/reverse_song");
            break;
        case TaskId::FirstWordPerLine:
            task.output_label = "first_words";
            task.instruction_template = store.get("tasks/first_words");
            break;
        case TaskId::MultiplyRange:
            task.output_label = "multiplication";
            task.instruction_template =
                fill("tasks/multiply_range",
                     {{"MULTIPLIER", param_or(params, "multiplier", "19.5")},
                      {"FROM", param_or(params, "mult_from", "10.5")},
                      {"TO", param_or(params, "mult_to", "32.99")}});
            break;
        case TaskId::NumbersReverseRange: {
            long long from = std::stoll(param_or(params, "list_from", "83"));
            long long to = std::stoll(param_or(params, "list_to", "39"));
            task.output_label = "numbers";
            task.instruction_template =
                fill("tasks/numbers_reverse_range",
                     {{"NUMBER_LIST", descending_number_list(from, to)}});
            break;
        }
        case TaskId::NumbersForeignReverse:
            task.output_label = "foreign_numbers";
            task.instruction_template =
                fill("tasks/foreign_numbers",
                     {{"LANGUAGE", param_or(params, "language", "es")},
                      {"FROM", param_or(params, "foreign_from", "99")},
                      {"TO", param_or(params, "foreign_to", "-99")}});
            break;
        case TaskId::ReverseAnswer:
            task.output_label = "reverse_answer";
            task.instruction_template = store.get("tasks/reverse_answer_final");
            break;
        case TaskId::Answer:
            task.output_label = "answer";
            task.instruction_template = store.get("tasks/answer_final");
            break;
    }
    return task;
}

LoadLevel make_level(LevelId id, LevelFamily family, std::vector<TaskId> ids,
                     const std::map<std::string, std::string>& params) {
    LoadLevel level;
    level.id = id;
    level.family = family;
    level.tasks.reserve(ids.size());
    for (TaskId task_id : ids) level.tasks.push_back(make_task(task_id, params));
    return level;
}

}  // namespace

LoadLevel compose_level(LevelId id,
                        const std::map<std::string, std::string>& params) {
    using enum TaskId;
    switch (id) {
        case LevelId::CL0:
            return make_level(id, LevelFamily::Stacked, {T7Answer}, params);
        case LevelId::CL1:
            return make_level(id, LevelFamily::Stacked,
                              {T1RemoveInstruction, T7Answer}, params);
        case LevelId::CL2:
            return make_level(id, LevelFamily::Stacked,
                              {T1RemoveInstruction, T2ReverseInstruction, T7Answer},
                              params);
        case LevelId::CL3:
            return make_level(id, LevelFamily::Stacked,
                              {T1RemoveInstruction, T2ReverseInstruction,
                               T3UserInstruction, T7Answer},
                              params);
        case LevelId::CL4:
            return make_level(id, LevelFamily::Stacked,
                              {T1RemoveInstruction, T2ReverseInstruction,
                               T3UserInstruction, T4NumbersRange, T7Answer},
                              params);
        case LevelId::CL5:
            return make_level(id, LevelFamily::Stacked,
                              {T1RemoveInstruction, T2ReverseInstruction,
                               T3UserInstruction, T4NumbersRange, T5Multiplication,
                               T7Answer},
                              params);
        case LevelId::CL6:
            return make_level(id, LevelFamily::Stacked,
                              {T1RemoveInstruction, T2ReverseInstruction,
                               T3UserInstruction, T4NumbersRange, T5Multiplication,
                               T6ReverseAnswer, T7Answer},
                              params);
        case LevelId::CL7:
            return make_level(id, LevelFamily::SonnetVariant,
                              {SongReverse, NumbersReverseRange, FirstWordPerLine,
                               Answer},
                              params);
        case LevelId::CL8:
            return make_level(id, LevelFamily::SonnetVariant,
                              {ReversePoem, SongReverse, MultiplyRange,
                               NumbersReverseRange, FirstWordPerLine, ReverseAnswer},
                              params);
        case LevelId::CL9:
            return make_level(id, LevelFamily::SonnetVariant,
                              {ReversePoem, SongReverse, MultiplyRange,
                               NumbersForeignReverse, FirstWordPerLine,
                               ReverseAnswer},
                              params);
        case LevelId::CL10: {
            auto p = params;
            if (!p.count("foreign_to")) p["foreign_to"] = "-59";
            return make_level(id, LevelFamily::SonnetVariant,
                              {SongReverse, FirstWordPerLine,
                               NumbersForeignReverse, ReversePoem, ReverseAnswer},
                              p);
        }
        case LevelId::CL11: {
            auto p = params;
            if (!p.count("foreign_to")) p["foreign_to"] = "-59";
            return make_level(id, LevelFamily::SonnetVariant,
                              {SongReverse, FirstWordPerLine,
                               NumbersForeignReverse, ReversePoem, ReverseAnswer},
                              p);
        }
    }
    raise(ErrorCode::UnknownLevel, "unhandled level id");
}

LoadLevel single_task_level(TaskId load_task,
                            const std::map<std::string, std::string>& params) {
    LoadLevel level = make_level(LevelId::CL1, LevelFamily::Stacked,
                                 {load_task, TaskId::T7Answer}, params);
    level.custom_label = std::string(to_string(load_task)) + "+T7";
    return level;
}

}  // namespace cogload::prompt
