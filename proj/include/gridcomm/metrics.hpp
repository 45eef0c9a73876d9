#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridcomm/channel.hpp"
#include "gridcomm/language.hpp"
#include "gridcomm/types.hpp"

namespace gridcomm {

/// One logged episode: the speaker's concept, what it said, and what the
/// listener did.
struct TraceRecord {
    std::int64_t episode_id = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
    ConceptVector concept_vector;
    /// Alphabet index of every message, one inner vector per round.
    std::vector<std::vector<std::int64_t>> rounds;
    /// Raw message values per round; only kept for continuous channels.
    std::vector<MessageSet> raw_rounds;
    std::vector<Action> actions;
    double reward = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using SymbolPair = std::pair<std::int64_t, std::int64_t>;

/// Joint counts N(c, m) with additive smoothing.
class TranslationModel {
public:
    TranslationModel(std::span<const SymbolPair> concept_message_pairs, double alpha);

    double p_concept_given_message(std::int64_t c, std::int64_t m) const;
    double p_message_given_concept(std::int64_t m, std::int64_t c) const;

    const std::vector<std::int64_t>& concepts() const { return concepts_; }
    const std::vector<std::int64_t>& messages() const { return messages_; }

private:
    double joint(std::int64_t c, std::int64_t m) const;

    std::map<SymbolPair, double> joint_;
    std::map<std::int64_t, double> concept_totals_;
    std::map<std::int64_t, double> message_totals_;
    std::vector<std::int64_t> concepts_;  // sorted, distinct
    std::vector<std::int64_t> messages_;
    double alpha_;
};

/// Context independence over (concept, message) pairs. The message chosen
/// for each concept maximises p(c|m); near-ties (relative 1e-12) go to the
/// larger p(m|c), then to the lowest message id. Throws on empty input.
double context_independence(std::span<const SymbolPair> concept_message_pairs, double alpha = 0.0);

/// Plug-in mutual information I(m; a) in bits over (message, action) pairs.
double causal_influence(std::span<const SymbolPair> message_action_pairs);

int hamming_distance(const ConceptVector& a, const ConceptVector& b);
int edit_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b);
double euclidean_distance(const MessageSet& a, const MessageSet& b);

/// Spearman rank correlation with average ranks for ties. Throws
/// ContractError("degenerate space") when either input has zero variance.
double spearman(std::span<const double> x, std::span<const double> y);

/// Hamming distance on concepts vs edit distance on symbol sequences.
double topographic_similarity(std::span<const ConceptVector> concepts,
                              std::span<const std::vector<std::int64_t>> messages);

/// Continuous channels: Euclidean distance between raw message sets.
double topographic_similarity(std::span<const ConceptVector> concepts,
                              std::span<const MessageSet> messages);

enum class SymbolView : std::uint8_t {
    kConcatenated,  // one symbol per round (default)
    kPerAttribute,  // message k paired with concept group k
};

std::vector<SymbolPair> concept_message_pairs(std::span<const TraceRecord> records,
                                              SymbolView view);
std::vector<SymbolPair> message_action_pairs(std::span<const TraceRecord> records);

struct MetricValue {
    std::optional<double> value;
    std::string error;  // set when the metric is undefined for the trace
};

struct MetricsReport {
    MetricValue ci;
    MetricValue cic;
    MetricValue topsim;
    std::size_t records = 0;
};

MetricsReport evaluate_trace(std::span<const TraceRecord> records,
                             SymbolView view = SymbolView::kConcatenated, double alpha = 0.0);

}  // namespace gridcomm
