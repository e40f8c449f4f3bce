#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace stackcheck {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

/// One node of a witness/counterexample tree.  Facts and children keep
/// insertion order; serialization is a pure function of the tree, so reports
/// are byte-identical across runs and parallelism settings.
struct ReportNode {
  std::string label;
  std::optional<bool> verdict;
  std::vector<std::pair<std::string, std::string>> facts;
  std::vector<ReportNode> children;

  ReportNode() = default;
  explicit ReportNode(std::string l) : label(std::move(l)) {}

  ReportNode& child(std::string l) {
    children.emplace_back(std::move(l));
    return children.back();
  }
  ReportNode& fact(std::string key, std::string value) {
    facts.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  ReportNode& set(bool v) {
    verdict = v;
    return *this;
  }
};

/// Outcome of one registered check: name, boolean verdict, witness tree, and
/// an input digest.  The timing field is always serialized as 0 so that
/// outputs are reproducible byte-for-byte; wall-clock measurements belong to
/// the caller, not the report.
struct CheckReport {
  std::string check;
  bool verdict = false;
  ReportNode root;
  std::string input_digest;
  double seconds = 0.0;

  std::string to_text(bool witnesses = true) const {
    std::ostringstream os;
    os << "check " << check << "\n";
    os << "verdict " << (verdict ? "true" : "false") << "\n";
    os << "digest " << input_digest << "\n";
    os << "seconds 0\n";
    text_node(os, root, 0, witnesses);
    return os.str();
  }

  std::string to_json(bool witnesses = true) const {
    nlohmann::ordered_json j;
    j["check"] = check;
    j["verdict"] = verdict;
    j["digest"] = input_digest;
    j["seconds"] = 0;
    j["tree"] = json_node(root, witnesses);
    return j.dump(2);
  }

private:
  static void text_node(std::ostringstream& os, const ReportNode& n, int depth, bool witnesses) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    os << pad << "- " << n.label;
    if (n.verdict) os << (*n.verdict ? " [ok]" : " [FAIL]");
    os << "\n";
    if (witnesses)
      for (const auto& [k, v] : n.facts) os << pad << "  " << k << " = " << v << "\n";
    for (const auto& c : n.children) text_node(os, c, depth + 1, witnesses);
  }

  static nlohmann::ordered_json json_node(const ReportNode& n, bool witnesses) {
    nlohmann::ordered_json j;
    j["label"] = n.label;
    if (n.verdict) j["verdict"] = *n.verdict;
    if (witnesses) {
      nlohmann::ordered_json facts = nlohmann::ordered_json::array();
      for (const auto& [k, v] : n.facts) facts.push_back({{"key", k}, {"value", v}});
      j["facts"] = std::move(facts);
    }
    nlohmann::ordered_json kids = nlohmann::ordered_json::array();
    for (const auto& c : n.children) kids.push_back(json_node(c, witnesses));
    j["children"] = std::move(kids);
    return j;
  }
};

}  // namespace stackcheck
