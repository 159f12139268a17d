#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "audiobook/script/diagnostics.hpp"
#include "audiobook/script/lexicon.hpp"
#include "audiobook/script/types.hpp"

namespace audiobook {

struct ParseResult {
  std::optional<ScriptDoc> doc;  // present only when there are no diagnostics
  std::vector<Diagnostic> diagnostics;
};

// Script format:
//   #title <text>
//   #voice <id> pitch=<Hz> rate=<wpm> [seed=<int>]
//   #env <preset>
//   (blank line separated paragraphs; one paragraph per segment)
//   @<voice>: dialogue paragraph
//   inline tags: [sfx: <event> | az= el= dist= env= at=<word>|at=t=<sec>
//                 dur= src=auto|retrieved|procedural asset= conf= id=
//                 traj=<t>:<az>:<el>:<d>;...]
// Header lines must precede the body. Errors are collected per line; the
// parser keeps going so one run reports every problem.
ParseResult parse_script(std::string_view text, const CueLexicon& lexicon = CueLexicon::builtin());

// Inverse of parse_script: every cue is written with explicit fields, so
// parse_script(serialize_script(d)) == d for any valid document.
std::string serialize_script(const ScriptDoc& doc);

// One diagnostic per invariant violation; empty iff the document is valid.
std::vector<Diagnostic> validate(const ScriptDoc& doc,
                                 const CueLexicon& lexicon = CueLexicon::builtin());

bool is_known_environment(const std::string& id);

}  // namespace audiobook
