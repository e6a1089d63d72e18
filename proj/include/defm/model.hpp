#pragma once

#include <optional>
#include <string>
#include <vector>

namespace defm {

enum class TermKind { logit, transition, association };

/// Partial constraints on the previous and current state. An outcome absent
/// from a side is left free. Constraints are stored in outcome declaration
/// order so parse -> print -> parse round-trips structurally.
struct PatternPair {
  std::vector<std::pair<std::string, bool>> prev;
  std::vector<std::pair<std::string, bool>> cur;

  bool operator==(const PatternPair&) const = default;
};

struct TermDecl {
  std::string name;
  TermKind kind = TermKind::logit;
  std::vector<PatternPair> patterns;  // summed
  std::optional<std::string> covariate;

  bool operator==(const TermDecl&) const = default;
};

/// A parsed model file: the declared outcome order, the statistic terms
/// (the map from a state pair to the statistic vector), and the support
/// exclusion rules.
struct ModelSpec {
  std::vector<std::string> outcomes;
  std::vector<TermDecl> terms;
  std::vector<PatternPair> forbids;

  bool operator==(const ModelSpec&) const = default;
};

/// Parses the line-oriented model grammar:
///
///   # comment
///   outcomes <name> (, <name>)*
///   term <name> = <expr> [* <covariate>]
///   forbid <pattern> -> <pattern>
///
///   <expr>    := <pattern> ("+" <pattern>)*
///              | <pattern> "->" <pattern>
///              | "logit(" <outcome> ")"
///   <pattern> := "{" <outcome>("+"|"-") ("," <outcome>("+"|"-"))* "}"
///
/// Diagnostics carry line and column. Semantic checks: outcomes declared
/// before use, unique term names, kind-specific shape rules.
ModelSpec parse_model(const std::string& text);

/// Canonical text rendering; parse(to_text(m)) == m.
std::string to_text(const ModelSpec& spec);

}  // namespace defm
