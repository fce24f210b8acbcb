#pragma once

#include <string>
#include <vector>

#include "cogload/obfuscation.hpp"
#include "cogload/tasks.hpp"

namespace cogload::prompt {

/// A fully rendered load-stacked prompt ready for dispatch.
struct AttackPrompt {
    LevelId level = LevelId::CL0;
    std::string level_label;
    std::string observation_task_plain;
    std::string rendered_text;
    std::vector<std::string> expected_labels;
    std::string obfuscation_id;

    std::string fingerprint() const;  // stable hash of rendered_text
};

struct RenderOptions {
    /// Carrier song lines for the sonnet-variant levels. Empty means the
    /// placeholder carrier from the template store.
    std::vector<std::string> carrier_lines;
    /// Approximate word count of the deterministic filler block prepended
    /// to the input of CL8/CL9/CL11 (input-side extraneous load).
    int input_filler_words = 120;
};

/// Renders `level` around the observation task. Stacked levels embed the
/// obfuscated task; sonnet-variant levels hide it in the carrier song.
/// Pure function of its inputs.
AttackPrompt render_prompt(const LoadLevel& level,
                           const std::string& observation_task,
                           const ObfuscationScheme& scheme,
                           const RenderOptions& options = {});

}  // namespace cogload::prompt
