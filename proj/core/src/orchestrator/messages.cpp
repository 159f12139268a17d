#include "audiobook/orchestrator/messages.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace audiobook {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kRequest: return "request";
    case MessageKind::kResult: return "result";
    case MessageKind::kCritique: return "critique";
  }
  return "request";
}

namespace {

MessageKind parse_kind(const std::string& s) {
  if (s == "request") return MessageKind::kRequest;
  if (s == "result") return MessageKind::kResult;
  if (s == "critique") return MessageKind::kCritique;
  throw std::invalid_argument("unknown message kind '" + s + "'");
}

}  // namespace

int MessageLog::post(std::string from, std::string to, MessageKind kind, int iteration, std::vector<int> parents,
                     nlohmann::json payload) {
  AgentMessage m;
  m.id = static_cast<int>(messages_.size()) + 1;
  m.from_agent = std::move(from);
  m.to_agent = std::move(to);
  m.kind = kind;
  m.iteration = iteration;
  m.parents = std::move(parents);
  m.payload = std::move(payload);
  messages_.push_back(std::move(m));
  return messages_.back().id;
}

nlohmann::json message_to_json(const AgentMessage& m) {
  return {{"id", m.id},         {"from", m.from_agent}, {"to", m.to_agent},      {"kind", to_string(m.kind)},
          {"iteration", m.iteration}, {"parents", m.parents}, {"payload", m.payload}};
}

AgentMessage message_from_json(const nlohmann::json& j) {
  AgentMessage m;
  m.id = j.at("id").get<int>();
  m.from_agent = j.at("from").get<std::string>();
  m.to_agent = j.at("to").get<std::string>();
  m.kind = parse_kind(j.at("kind").get<std::string>());
  m.iteration = j.at("iteration").get<int>();
  m.parents = j.at("parents").get<std::vector<int>>();
  m.payload = j.at("payload");
  return m;
}

std::string to_jsonl(const std::vector<AgentMessage>& messages) {
  std::string out;
  for (const auto& m : messages) out += message_to_json(m).dump() + "\n";
  return out;
}

std::vector<AgentMessage> from_jsonl(const std::string& text) {
  std::vector<AgentMessage> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(message_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

std::vector<std::string> check_message_log(const std::vector<AgentMessage>& messages, int max_iters) {
  std::vector<std::string> problems;
  std::map<int, const AgentMessage*> by_id;
  for (const auto& m : messages) {
    if (!by_id.emplace(m.id, &m).second) problems.push_back("duplicate message id " + std::to_string(m.id));
  }
  for (const auto& m : messages) {
    const std::string where = "message " + std::to_string(m.id);
    if (m.iteration < 1 || m.iteration > max_iters) problems.push_back(where + ": iteration out of range");
    const std::string prefix = std::string(to_string(m.kind)) + ".";
    if (!m.payload.is_object() || !m.payload.contains("schema") || !m.payload["schema"].is_string()) {
      problems.push_back(where + ": payload has no schema tag");
    } else {
      const auto schema = m.payload["schema"].get<std::string>();
      if (schema.rfind(prefix, 0) != 0 || schema.find('/') == std::string::npos) {
        problems.push_back(where + ": schema '" + schema + "' does not match kind " + to_string(m.kind));
      }
    }
    for (int p : m.parents) {
      auto it = by_id.find(p);
      if (it == by_id.end()) {
        problems.push_back(where + ": unknown parent " + std::to_string(p));
      } else if (it->second->iteration > m.iteration) {
        problems.push_back(where + ": parent " + std::to_string(p) + " is from a later iteration");
      }
    }
  }
  // Kahn's algorithm per iteration over parent edges inside the iteration.
  std::map<int, std::vector<const AgentMessage*>> per_iteration;
  for (const auto& m : messages) per_iteration[m.iteration].push_back(&m);
  for (const auto& [iteration, group] : per_iteration) {
    std::map<int, int> indegree;
    std::map<int, std::vector<int>> children;
    for (const auto* m : group) indegree.emplace(m->id, 0);
    for (const auto* m : group) {
      for (int p : m->parents) {
        if (!indegree.contains(p)) continue;
        ++indegree[m->id];
        children[p].push_back(m->id);
      }
    }
    std::vector<int> ready;
    for (const auto& [id, d] : indegree) {
      if (d == 0) ready.push_back(id);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
      const int id = ready.back();
      ready.pop_back();
      ++seen;
      for (int c : children[id]) {
        if (--indegree[c] == 0) ready.push_back(c);
      }
    }
    if (seen != indegree.size()) problems.push_back("iteration " + std::to_string(iteration) + ": messages form a cycle");
  }
  return problems;
}

}  // namespace audiobook
