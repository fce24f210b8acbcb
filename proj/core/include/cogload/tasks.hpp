#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cogload::prompt {

/// Atomic load tasks. T1..T7 form the stacked family; the rest are the
/// sonnet-variant tasks used by CL7..CL11.
enum class TaskId {
    T1RemoveInstruction,
    T2ReverseInstruction,
    T3UserInstruction,
    T4NumbersRange,
    T5Multiplication,
    T6ReverseAnswer,
    T7Answer,
    ReversePoem,
    SongReverse,
    FirstWordPerLine,
    MultiplyRange,
    NumbersReverseRange,
    NumbersForeignReverse,
    ReverseAnswer,
    Answer,
};

std::string_view to_string(TaskId id);

/// True for the tasks that produce the observation-task answer. Levels
/// always end with one of these; CL8..CL11 end with the reversed variant.
bool is_answer_task(TaskId id);

struct TaskSpec {
    TaskId id;
    std::map<std::string, std::string> params;
    std::string instruction_template;  // resolved instruction text
    std::string output_label;
};

enum class LevelId {
    CL0, CL1, CL2, CL3, CL4, CL5, CL6,   // stacked
    CL7, CL8, CL9, CL10, CL11,           // sonnet variants
};

std::string_view to_string(LevelId id);
LevelId level_from_string(const std::string& name);  // throws UnknownLevel
int level_index(LevelId id);
std::vector<LevelId> all_levels();

enum class LevelFamily { Stacked, SonnetVariant };

struct LoadLevel {
    LevelId id = LevelId::CL0;
    std::vector<TaskSpec> tasks;
    LevelFamily family = LevelFamily::Stacked;
    /// Set for ad-hoc single-task levels used by dual-task measurement
    /// (e.g. "T2+T7"); empty for the canonical CL0..CL11.
    std::string custom_label;

    std::string label() const;
    std::vector<std::string> output_labels() const;
    bool ends_with_reverse_answer() const;
    /// Label of the section holding the observation-task answer.
    const std::string& answer_label() const;
    /// Tasks minus the trailing answer task.
    std::vector<TaskSpec> load_tasks() const;
};

/// Parameters understood by compose_level (all optional):
///   "range_bound"     T4 bound X, default 20
///   "multiplier"      T5 multiplier, default 13
///   "mult_from"/"mult_to"  T5 table span, default 1..10
///   "language"        foreign-number language tag, default "es"
/// Values are decimal strings.
LoadLevel compose_level(LevelId id,
                        const std::map<std::string, std::string>& params = {});

/// Ad-hoc dual-task level: one load task followed by the answer task.
LoadLevel single_task_level(TaskId load_task,
                            const std::map<std::string, std::string>& params = {});

}  // namespace cogload::prompt
