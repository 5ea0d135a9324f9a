#include "ctmine/prompts.hpp"

#include <stdexcept>

namespace ctmine::classify {

namespace {

// The three zero-shot instruction blocks. Wording, spacing and punctuation
// are frozen; golden-file tests pin every byte.

constexpr const char* kSimpleInstruction =
    "Decide whether the following transcription of a video talks about a conspiracy theory "
    "or not (if yes output = 1/else  output=0). Provide just your output, no justification.";

// the simple instruction with its final sentence dropped
constexpr const char* kBareInstruction =
    "Decide whether the following transcription of a video talks about a conspiracy theory "
    "or not (if yes output = 1/else  output=0).";

constexpr const char* kDefinitionPreamble = "Given this definition of conspiracy theory:";

constexpr const char* kDefinition =
    "A conspiracy theory is a belief that two or more actors have coordinated in secret to "
    "achieve an outcome and that their conspiracy is of public interest but not public "
    "knowledge. Conspiracy theories (a) are oppositional, which means they oppose publicly "
    "accepted understandings of events; (b) describe malevolent or forbidden acts; (c) "
    "ascribe agency to individuals and groups rather than to impersonal or systemic forces; "
    "(d) are epistemically risky, meaning that though they are not necessarily false or "
    "implausible, taken collectively they are more prone to falsity than other types of "
    "belief; and (e) are social constructs that are not merely adopted by individuals but "
    "are shared with social objectives in mind, and they have the potential not only to "
    "represent and interpret reality but also to fashion new social realities";

constexpr const char* kStepSuffix =
    "First, extract the narrative or claim from the text.  Second, decide if the claim talks "
    "about a conspiracy theory. Third, answer the question (if yes output = 1/else  output=0)";

}  // namespace

const char* prompt_variant_name(PromptVariant v) {
    switch (v) {
        case PromptVariant::Simple: return "simple";
        case PromptVariant::Definition: return "definition";
        case PromptVariant::StepByStep: return "step_by_step";
    }
    return "simple";
}

PromptVariant parse_prompt_variant(std::string_view name) {
    if (name == "simple") return PromptVariant::Simple;
    if (name == "definition") return PromptVariant::Definition;
    if (name == "step_by_step" || name == "step-by-step") return PromptVariant::StepByStep;
    throw std::invalid_argument("unknown prompt variant: " + std::string(name));
}

std::string prompt_instruction(PromptVariant v) {
    switch (v) {
        case PromptVariant::Simple:
            return kSimpleInstruction;
        case PromptVariant::Definition:
            return std::string(kDefinitionPreamble) + "\n" + kDefinition + "\n\n" +
                   kSimpleInstruction;
        case PromptVariant::StepByStep:
            return std::string(kBareInstruction) + " " + kStepSuffix;
    }
    throw std::invalid_argument("unknown prompt variant");
}

std::string render_prompt(PromptVariant v, std::string_view transcript) {
    if (transcript.empty()) throw std::invalid_argument("render_prompt: empty transcript");
    return prompt_instruction(v) + "\n\nTranscription:\n" + std::string(transcript);
}

}  // namespace ctmine::classify
