#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace audiobook {

enum class MessageKind { kRequest, kResult, kCritique };

const char* to_string(MessageKind kind);

// One hop of the agent protocol. `parents` lists the ids of the messages
// this one was produced from. The payload carries a "schema" tag of the
// form "<kind>.<topic>/<version>", e.g. "result.narration/1".
struct AgentMessage {
  int id = 0;
  std::string from_agent;
  std::string to_agent;
  MessageKind kind = MessageKind::kRequest;
  int iteration = 1;
  std::vector<int> parents;
  nlohmann::json payload;
};

// Append-only log that hands out ids.
class MessageLog {
 public:
  int post(std::string from, std::string to, MessageKind kind, int iteration, std::vector<int> parents,
           nlohmann::json payload);
  const std::vector<AgentMessage>& messages() const { return messages_; }

 private:
  std::vector<AgentMessage> messages_;
};

nlohmann::json message_to_json(const AgentMessage& m);
AgentMessage message_from_json(const nlohmann::json& j);
// One JSON object per line.
std::string to_jsonl(const std::vector<AgentMessage>& messages);
std::vector<AgentMessage> from_jsonl(const std::string& text);

// Protocol problems, empty when the log is sound: unique ids, known
// parents, schema tags that match the kind, 1 <= iteration <= max_iters,
// parents never in a later iteration, and no cycle among the messages of
// any one iteration.
std::vector<std::string> check_message_log(const std::vector<AgentMessage>& messages, int max_iters);

}  // namespace audiobook
