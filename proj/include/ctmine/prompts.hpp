#pragma once

#include <string>
#include <string_view>

namespace ctmine::classify {

enum class PromptVariant { Simple, Definition, StepByStep };

const char* prompt_variant_name(PromptVariant v);
PromptVariant parse_prompt_variant(std::string_view name);  // throws std::invalid_argument

// The fixed instruction block of a variant, without any transcript.
std::string prompt_instruction(PromptVariant v);

// Instruction block + blank line + "Transcription:" header + transcript.
// Throws std::invalid_argument on an empty transcript.
std::string render_prompt(PromptVariant v, std::string_view transcript);

}  // namespace ctmine::classify
