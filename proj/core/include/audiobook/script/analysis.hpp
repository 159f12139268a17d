#pragma once

#include <vector>

#include "audiobook/script/lexicon.hpp"
#include "audiobook/script/types.hpp"

namespace audiobook {

// Keyword cues found in prose. One cue per event per sentence, anchored at
// the first trigger word. Direction and distance phrases are looked for
// from four words before to eight words after the trigger, inside the same
// sentence. A segment that already carries a tagged cue of the same event,
// or a tagged cue at the trigger word, yields nothing for that event.
std::vector<SoundCue> extract_cues_prose(const ScriptDoc& doc,
                                         const CueLexicon& lexicon = CueLexicon::builtin());

// Mean valence of lexicon words in the segment, 0 when none match.
double sentiment_score(const Segment& segment,
                       const SentimentLexicon& lexicon = SentimentLexicon::builtin());

}  // namespace audiobook
