#pragma once

#include <bitset>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridcomm/random.hpp"
#include "gridcomm/types.hpp"
#include "gridcomm/world.hpp"

namespace gridcomm {

enum class GrammarKind : std::uint8_t { kSimpleIntrans, kSimpleTrans };

std::string_view to_string(GrammarKind g);
std::optional<GrammarKind> grammar_from_string(std::string_view s);

/// True when the grammar can express tasks with this verb.
bool grammar_accepts(GrammarKind g, Verb v);

inline constexpr int kMaxCount = 4;

/// Surface words. Every entry may span several tokens ("four times").
struct Lexicon {
    std::map<Verb, std::string> verbs;
    std::map<Shape, std::string> shapes;
    std::map<Color, std::string> colors;
    std::map<Weight, std::string> weights;
    std::map<int, std::string> adverbs;  // count -> numeral adverb, count >= 2
    std::string size_prefix = "size-";
    std::string direction_word = "to";
    std::string article = "the";

    static const Lexicon& standard();
};

struct Instruction {
    std::vector<std::string> tokens;

    std::string text() const;
    static Instruction from_text(const std::string& text);
    friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// Which optional adjectives an instruction mentions.
struct AdjectiveChoice {
    bool size = false;
    bool color = false;
    bool weight = false;
};

struct ParsedInstruction {
    Verb verb = Verb::kWalk;
    std::optional<int> size;
    std::optional<Color> color;
    std::optional<Weight> weight;
    Shape noun = Shape::kSquare;
    int count = 1;

    friend bool operator==(const ParsedInstruction&, const ParsedInstruction&) = default;
};

/// Deterministic rendering of "VERB (to)? the (SIZE)? (COLOR)? (WEIGHT)? NOUN (ADVERB)?".
Instruction render_instruction(const TaskSpec& task, const ObjectSpec& target,
                               GrammarKind grammar, AdjectiveChoice adjectives,
                               const Lexicon& lexicon = Lexicon::standard());

/// Draws the adjective subset from `rng`, then renders.
Instruction generate_instruction(const TaskSpec& task, const ObjectSpec& target,
                                 GrammarKind grammar, Rng& rng,
                                 const Lexicon& lexicon = Lexicon::standard());

/// Throws ParseError naming the offending token.
ParsedInstruction parse_instruction(const Instruction& instruction,
                                    const Lexicon& lexicon = Lexicon::standard());

// ---------------------------------------------------------------------------
// Speaker-side concept encoding.

inline constexpr int kConceptBits = 18;

namespace concept_bit {
inline constexpr int kSize = 0;
inline constexpr int kShape = 4;
inline constexpr int kColor = 8;
inline constexpr int kWeight = 12;
inline constexpr int kTask = 14;  // walk, push, pull, pickup
}  // namespace concept_bit

struct ConceptFields {
    std::optional<int> size;
    std::optional<Shape> shape;
    std::optional<Color> color;
    std::optional<Weight> weight;
    std::optional<Verb> verb;

    friend bool operator==(const ConceptFields&, const ConceptFields&) = default;
};

struct ConceptVector {
    std::bitset<kConceptBits> bits;

    /// Bits as '0'/'1' characters, bit 0 first.
    std::string to_string() const;
    static ConceptVector from_string(const std::string& s);
    /// Integer symbol with bit i weighted 2^i.
    std::uint32_t symbol() const { return static_cast<std::uint32_t>(bits.to_ulong()); }

    /// Each group one-hot or empty, and the task group non-empty.
    bool well_formed() const;
    ConceptFields decode() const;

    friend bool operator==(const ConceptVector&, const ConceptVector&) = default;
};

ConceptVector make_concept(int size, Shape shape, Color color, Weight weight, Verb verb);

/// Throws ContractError for drop (no task slot) or when the instruction
/// contradicts the target object.
ConceptVector encode_concept(const ParsedInstruction& parsed, const ObjectSpec& target);

/// All 4*4*4*2*4 = 512 well-formed, fully specified concepts.
std::vector<ConceptVector> all_concepts();

}  // namespace gridcomm
