#include "gridcomm/language.hpp"

#include <algorithm>
#include <sstream>

#include "gridcomm/error.hpp"

namespace gridcomm {

std::string_view to_string(GrammarKind g) {
    return g == GrammarKind::kSimpleIntrans ? "simple_intrans" : "simple_trans";
}

std::optional<GrammarKind> grammar_from_string(std::string_view s) {
    if (s == "simple_intrans") return GrammarKind::kSimpleIntrans;
    if (s == "simple_trans") return GrammarKind::kSimpleTrans;
    return std::nullopt;
}

bool grammar_accepts(GrammarKind g, Verb v) {
    if (g == GrammarKind::kSimpleIntrans) return v == Verb::kWalk;
    return v == Verb::kPush || v == Verb::kPull || v == Verb::kPickup;
}

const Lexicon& Lexicon::standard() {
    static const Lexicon lex = [] {
        Lexicon l;
        for (Verb v : {Verb::kWalk, Verb::kPush, Verb::kPull, Verb::kPickup, Verb::kDrop}) {
            l.verbs[v] = std::string(to_string(v));
        }
        for (Shape s : kAllShapes) l.shapes[s] = std::string(to_string(s));
        for (Color c : kAllColors) l.colors[c] = std::string(to_string(c));
        for (Weight w : kAllWeights) l.weights[w] = std::string(to_string(w));
        l.adverbs = {{2, "twice"}, {3, "thrice"}, {4, "four times"}};
        return l;
    }();
    return lex;
}

namespace {

std::vector<std::string> split_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

void append_words(std::vector<std::string>& tokens, const std::string& phrase) {
    for (auto& w : split_words(phrase)) tokens.push_back(std::move(w));
}

}  // namespace

std::string Instruction::text() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

Instruction Instruction::from_text(const std::string& text) { return {split_words(text)}; }

Instruction render_instruction(const TaskSpec& task, const ObjectSpec& target,
                               GrammarKind grammar, AdjectiveChoice adjectives,
                               const Lexicon& lexicon) {
    if (!grammar_accepts(grammar, task.verb)) {
        throw ContractError("verb '" + std::string(to_string(task.verb)) +
                            "' is not expressible in grammar " +
                            std::string(to_string(grammar)));
    }
    if (task.count < 1 || task.count > kMaxCount) {
        throw ContractError("count must be between 1 and " + std::to_string(kMaxCount));
    }
    Instruction instr;
    append_words(instr.tokens, lexicon.verbs.at(task.verb));
    if (task.verb == Verb::kWalk) append_words(instr.tokens, lexicon.direction_word);
    append_words(instr.tokens, lexicon.article);
    if (adjectives.size) instr.tokens.push_back(lexicon.size_prefix + std::to_string(target.size));
    if (adjectives.color) append_words(instr.tokens, lexicon.colors.at(target.color));
    if (adjectives.weight) append_words(instr.tokens, lexicon.weights.at(target.weight));
    append_words(instr.tokens, lexicon.shapes.at(target.shape));
    if (task.count > 1) append_words(instr.tokens, lexicon.adverbs.at(task.count));
    return instr;
}

Instruction generate_instruction(const TaskSpec& task, const ObjectSpec& target,
                                 GrammarKind grammar, Rng& rng, const Lexicon& lexicon) {
    AdjectiveChoice adj;
    adj.size = bernoulli(rng, 0.5);
    adj.color = bernoulli(rng, 0.5);
    adj.weight = bernoulli(rng, 0.5);
    return render_instruction(task, target, grammar, adj, lexicon);
}

namespace {

// Cursor over the token stream that matches multi-word lexicon phrases.
class TokenCursor {
public:
    explicit TokenCursor(const std::vector<std::string>& tokens) : tokens_(tokens) {}

    bool at_end() const { return pos_ >= tokens_.size(); }
    const std::string& peek() const {
        static const std::string kEnd = "<end>";
        return at_end() ? kEnd : tokens_[pos_];
    }

    bool accept(const std::string& phrase) {
        const auto words = split_words(phrase);
        if (words.empty() || pos_ + words.size() > tokens_.size()) return false;
        if (!std::equal(words.begin(), words.end(), tokens_.begin() + pos_)) return false;
        pos_ += words.size();
        return true;
    }

    template <typename Key>
    std::optional<Key> accept_any(const std::map<Key, std::string>& table) {
        // Longest phrase first so "four times" is not shadowed by a shorter entry.
        std::optional<Key> best;
        std::size_t best_len = 0;
        for (const auto& [key, phrase] : table) {
            const auto len = split_words(phrase).size();
            if (len > best_len && matches(phrase)) {
                best = key;
                best_len = len;
            }
        }
        if (best) pos_ += best_len;
        return best;
    }

    void advance() { ++pos_; }

private:
    bool matches(const std::string& phrase) const {
        const auto words = split_words(phrase);
        return !words.empty() && pos_ + words.size() <= tokens_.size() &&
               std::equal(words.begin(), words.end(), tokens_.begin() + pos_);
    }

    const std::vector<std::string>& tokens_;
    std::size_t pos_ = 0;
};

bool known_word(const Lexicon& lex, const std::string& token) {
    auto in_table = [&token](const auto& table) {
        return std::any_of(table.begin(), table.end(), [&token](const auto& kv) {
            const auto words = split_words(kv.second);
            return std::find(words.begin(), words.end(), token) != words.end();
        });
    };
    if (token == lex.direction_word || token == lex.article) return true;
    if (token.rfind(lex.size_prefix, 0) == 0) return true;
    return in_table(lex.verbs) || in_table(lex.shapes) || in_table(lex.colors) ||
           in_table(lex.weights) || in_table(lex.adverbs);
}

[[noreturn]] void fail_at(const Lexicon& lex, const std::string& token, const std::string& want) {
    if (token != "<end>" && !known_word(lex, token)) {
        throw ParseError("unknown token '" + token + "'", token);
    }
    throw ParseError("unexpected token '" + token + "', expected " + want, token);
}

std::optional<int> accept_size(TokenCursor& cur, const Lexicon& lex) {
    const std::string& tok = cur.peek();
    if (cur.at_end() || tok.rfind(lex.size_prefix, 0) != 0) return std::nullopt;
    const std::string digits = tok.substr(lex.size_prefix.size());
    if (digits.size() != 1 || digits[0] < '1' || digits[0] > '0' + kNumSizes) {
        throw ParseError("unknown token '" + tok + "'", tok);
    }
    cur.advance();
    return digits[0] - '0';
}

}  // namespace

ParsedInstruction parse_instruction(const Instruction& instruction, const Lexicon& lexicon) {
    TokenCursor cur(instruction.tokens);
    ParsedInstruction out;

    const auto verb = cur.accept_any(lexicon.verbs);
    if (!verb) fail_at(lexicon, cur.peek(), "a verb");
    out.verb = *verb;
    if (out.verb == Verb::kWalk && !cur.accept(lexicon.direction_word)) {
        fail_at(lexicon, cur.peek(), "'" + lexicon.direction_word + "'");
    }
    if (!cur.accept(lexicon.article)) fail_at(lexicon, cur.peek(), "'" + lexicon.article + "'");

    out.size = accept_size(cur, lexicon);
    out.color = cur.accept_any(lexicon.colors);
    out.weight = cur.accept_any(lexicon.weights);

    const auto noun = cur.accept_any(lexicon.shapes);
    if (!noun) fail_at(lexicon, cur.peek(), "a shape noun");
    out.noun = *noun;

    if (!cur.at_end()) {
        const auto count = cur.accept_any(lexicon.adverbs);
        if (!count) fail_at(lexicon, cur.peek(), "a numeral adverb or end of instruction");
        out.count = *count;
    }
    if (!cur.at_end()) fail_at(lexicon, cur.peek(), "end of instruction");
    return out;
}

std::string ConceptVector::to_string() const {
    std::string s(kConceptBits, '0');
    for (int i = 0; i < kConceptBits; ++i) {
        if (bits.test(static_cast<std::size_t>(i))) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

ConceptVector ConceptVector::from_string(const std::string& s) {
    if (s.size() != kConceptBits) throw ContractError("concept string must have 18 bits");
    ConceptVector c;
    for (int i = 0; i < kConceptBits; ++i) {
        const char ch = s[static_cast<std::size_t>(i)];
        if (ch != '0' && ch != '1') throw ContractError("concept string must be binary");
        c.bits.set(static_cast<std::size_t>(i), ch == '1');
    }
    return c;
}

namespace {

struct Group {
    int base;
    int width;
};
constexpr std::array<Group, 5> kConceptGroups{{{concept_bit::kSize, 4},
                                               {concept_bit::kShape, 4},
                                               {concept_bit::kColor, 4},
                                               {concept_bit::kWeight, 2},
                                               {concept_bit::kTask, 4}}};

int group_popcount(const std::bitset<kConceptBits>& bits, Group g) {
    int n = 0;
    for (int i = 0; i < g.width; ++i) n += bits.test(static_cast<std::size_t>(g.base + i));
    return n;
}

std::optional<int> group_index(const std::bitset<kConceptBits>& bits, Group g) {
    for (int i = 0; i < g.width; ++i) {
        if (bits.test(static_cast<std::size_t>(g.base + i))) return i;
    }
    return std::nullopt;
}

}  // namespace

bool ConceptVector::well_formed() const {
    for (const Group g : kConceptGroups) {
        if (group_popcount(bits, g) > 1) return false;
    }
    return group_popcount(bits, kConceptGroups[4]) == 1;
}

ConceptFields ConceptVector::decode() const {
    ConceptFields f;
    if (auto i = group_index(bits, kConceptGroups[0])) f.size = *i + 1;
    if (auto i = group_index(bits, kConceptGroups[1])) f.shape = static_cast<Shape>(*i);
    if (auto i = group_index(bits, kConceptGroups[2])) f.color = static_cast<Color>(*i);
    if (auto i = group_index(bits, kConceptGroups[3])) f.weight = static_cast<Weight>(*i);
    if (auto i = group_index(bits, kConceptGroups[4])) f.verb = static_cast<Verb>(*i);
    return f;
}

ConceptVector make_concept(int size, Shape shape, Color color, Weight weight, Verb verb) {
    if (verb == Verb::kDrop) throw ContractError("drop has no slot in the concept encoding");
    if (size < 1 || size > kNumSizes) throw ContractError("size must be 1..4");
    ConceptVector c;
    c.bits.set(static_cast<std::size_t>(concept_bit::kSize + size - 1));
    c.bits.set(static_cast<std::size_t>(concept_bit::kShape + static_cast<int>(shape)));
    c.bits.set(static_cast<std::size_t>(concept_bit::kColor + static_cast<int>(color)));
    c.bits.set(static_cast<std::size_t>(concept_bit::kWeight + static_cast<int>(weight)));
    c.bits.set(static_cast<std::size_t>(concept_bit::kTask + static_cast<int>(verb)));
    return c;
}

ConceptVector encode_concept(const ParsedInstruction& parsed, const ObjectSpec& target) {
    if (parsed.noun != target.shape || (parsed.size && *parsed.size != target.size) ||
        (parsed.color && *parsed.color != target.color) ||
        (parsed.weight && *parsed.weight != target.weight)) {
        throw ContractError("instruction does not describe the target object");
    }
    return make_concept(target.size, target.shape, target.color, target.weight, parsed.verb);
}

std::vector<ConceptVector> all_concepts() {
    std::vector<ConceptVector> out;
    out.reserve(512);
    for (Verb v : {Verb::kWalk, Verb::kPush, Verb::kPull, Verb::kPickup}) {
        for (Weight w : kAllWeights) {
            for (Color c : kAllColors) {
                for (Shape s : kAllShapes) {
                    for (int size = 1; size <= kNumSizes; ++size) {
                        out.push_back(make_concept(size, s, c, w, v));
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace gridcomm
