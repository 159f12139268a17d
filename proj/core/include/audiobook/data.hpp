#pragma once

#include <string_view>

// Data files compiled into the library. See core/data/.
namespace audiobook::data {
extern const std::string_view cmudict;
extern const std::string_view cue_lexicon;
extern const std::string_view sentiment_lexicon;
extern const std::string_view environments;
extern const std::string_view transition_lstm;
}  // namespace audiobook::data
