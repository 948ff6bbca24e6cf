#pragma once

#include "logmorph/event.hpp"
#include "logmorph/pattern.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace logmorph {

/// Volatile field kinds that are abstracted before grouping.
enum class MaskKind : std::uint8_t { Timestamp, Pid, Host, Ip, Number, Hex };

std::string_view to_string(MaskKind k) noexcept;
/// Accepts the names above in any case plus "ts" for Timestamp.
std::optional<MaskKind> parse_mask_kind(std::string_view s);

/// Placeholder for timestamp-like fields.
inline constexpr std::string_view kWildcard = "*";
/// Placeholder for every other variable.
inline constexpr std::string_view kVariable = "(...)";

/// A word, or a masked field that still remembers its original text.
struct Token {
  std::string text;
  std::optional<MaskKind> mask;

  bool masked() const noexcept { return mask.has_value(); }
  /// Words compare by text; masked tokens compare by kind only.
  friend bool operator==(const Token& a, const Token& b) {
    if (a.mask || b.mask) return a.mask == b.mask;
    return a.text == b.text;
  }
};

using TokenSeq = std::vector<Token>;

/// Splits on whitespace runs and strips trailing ",.;:" from each token.
/// Tokens left empty by stripping are dropped.
TokenSeq tokenize(std::string_view message);

/// The skeleton form: words as-is, "*" for timestamps, "(...)" for other
/// masks, joined by single spaces.
std::string render(const TokenSeq& tokens);

struct MaskStage {
  MaskKind kind;
  Pattern pattern;
};

/// Built-in whole-token detector for `kind`.
MaskStage builtin_stage(MaskKind kind);
std::vector<MaskStage> builtin_stages(std::span<const MaskKind> kinds);
/// Host stage that recognizes exactly the given names, ignoring case.
MaskStage host_stage(std::span<const std::string> hosts);

/// Masks each token with the first stage whose pattern matches it in full.
/// Length is preserved.
TokenSeq apply_masks(TokenSeq tokens, std::span<const MaskStage> stages);

/// Distinct rendered skeletons over all messages.
std::size_t unique_skeleton_count(std::span<const EventRecord> events,
                                  std::span<const MaskStage> stages);

/// Normalized token-level Levenshtein distance in [0,1].
double token_distance(const TokenSeq& a, const TokenSeq& b);

enum class VariableType : std::uint8_t {
  Port,
  WebAddress,
  VersionNumber,
  FileName,
  ErrorCode,
  Number,
  Unknown,
};

std::string_view to_string(VariableType t) noexcept;

/// Whether a variable value has the shape of `type`. `previous` is the token
/// before it in the message (used by ErrorCode).
bool value_has_type(VariableType type, std::string_view value,
                    std::string_view previous = {});

struct SlotType {
  VariableType type = VariableType::Unknown;
  /// Fraction of absorbed values matching `type` (best fraction when Unknown).
  double ratio = 0.0;
};

struct Slot {
  bool is_const = false;
  std::string text;               // Const only
  std::optional<MaskKind> mask;   // Var whose values were all masked alike
  std::optional<SlotType> type;   // Var, after type_variables

  static Slot constant(std::string text) { return {true, std::move(text), {}, {}}; }
  static Slot variable(std::optional<MaskKind> mask = {}) {
    return {false, {}, mask, {}};
  }
  std::string render() const;
};

using TemplateId = std::uint32_t;
/// Assignment value for events in the outlier bucket.
inline constexpr TemplateId kOutlierId = 0;

struct Template {
  TemplateId id = 0;
  std::vector<Slot> slots;
  std::size_t support = 0;
  std::vector<std::uint64_t> example_seqs;  // at most 3, ascending

  std::size_t const_count() const;
  std::string render() const;
};

struct MinerConfig {
  /// Absolute support s; unset means max(2, ceil(0.001 * N)).
  std::optional<std::size_t> support;
  double type_threshold = 0.9;
  double merge_distance = 0.2;
  std::vector<MaskStage> stages = default_stages();

  static std::vector<MaskStage> default_stages();
  std::size_t effective_support(std::size_t corpus_size) const;
  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
};

struct TemplateCatalog {
  std::vector<Template> templates;  // ascending id
  std::size_t outliers = 0;
  std::vector<std::uint64_t> outlier_examples;  // at most 3
  /// (seq, template id or kOutlierId), ascending seq.
  std::vector<std::pair<std::uint64_t, TemplateId>> assignments;
  std::vector<MaskStage> stages;
  std::size_t support_threshold = 0;

  const Template* find(TemplateId id) const;
  /// nullopt when the seq was not part of the mined corpus.
  std::optional<TemplateId> assignment(std::uint64_t seq) const;
  std::size_t total_support() const;
};

/// Frequent (position, token) clustering. Every event lands in exactly one
/// template or the outlier bucket.
TemplateCatalog mine_templates(std::span<const EventRecord> events,
                               const MinerConfig& cfg);

/// Single-link merge of equal-length templates whose positional slot
/// distance is at most `distance`. Positions that disagree become Var.
TemplateCatalog merge_templates(const TemplateCatalog& catalog,
                                double distance);

/// Annotates Var slots with a value type when at least `threshold` of their
/// absorbed values match it.
TemplateCatalog type_variables(const TemplateCatalog& catalog,
                               std::span<const EventRecord> events,
                               double threshold);

/// The template with the message's masked length whose Const slots all
/// match; most Const slots wins, then lowest id.
std::optional<TemplateId> match_template(std::string_view message,
                                         const TemplateCatalog& catalog,
                                         std::span<const MaskStage> stages);

/// Templates plus distinct outlier skeletons: the class count reported by
/// the refinement curve.
std::size_t class_count(const TemplateCatalog& catalog,
                        std::span<const EventRecord> events);

/// One template per line "id<TAB>support<TAB>skeleton", then a trailing
/// "# outliers<TAB>count" line.
void write_catalog(const TemplateCatalog& catalog, std::ostream& out);

}  // namespace logmorph
