#pragma once

#include <stdexcept>

namespace ctmine {

// Lookup of a hashtag/word that is not in the (filtered) vocabulary.
struct KeyMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// HTTP transport failed after bounded retries.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Prompt exceeded the model's context window.
struct ContextOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ctmine
