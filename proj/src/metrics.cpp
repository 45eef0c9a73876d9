#include "gridcomm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gridcomm/error.hpp"

namespace gridcomm {

TranslationModel::TranslationModel(std::span<const SymbolPair> pairs, double alpha)
    : alpha_(alpha) {
    if (pairs.empty()) throw ContractError("translation model needs at least one pair");
    if (!(alpha >= 0.0)) throw ContractError("smoothing constant must be non-negative");
    for (const auto& [c, m] : pairs) {
        joint_[{c, m}] += 1.0;
        concept_totals_[c] += 1.0;
        message_totals_[m] += 1.0;
    }
    for (const auto& kv : concept_totals_) concepts_.push_back(kv.first);
    for (const auto& kv : message_totals_) messages_.push_back(kv.first);
}

double TranslationModel::joint(std::int64_t c, std::int64_t m) const {
    auto it = joint_.find({c, m});
    return it == joint_.end() ? 0.0 : it->second;
}

double TranslationModel::p_concept_given_message(std::int64_t c, std::int64_t m) const {
    auto it = message_totals_.find(m);
    const double n_m = it == message_totals_.end() ? 0.0 : it->second;
    const double denom = n_m + alpha_ * static_cast<double>(concepts_.size());
    return denom > 0.0 ? (joint(c, m) + alpha_) / denom : 0.0;
}

double TranslationModel::p_message_given_concept(std::int64_t m, std::int64_t c) const {
    auto it = concept_totals_.find(c);
    const double n_c = it == concept_totals_.end() ? 0.0 : it->second;
    const double denom = n_c + alpha_ * static_cast<double>(messages_.size());
    return denom > 0.0 ? (joint(c, m) + alpha_) / denom : 0.0;
}

namespace {

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double context_independence(std::span<const SymbolPair> pairs, double alpha) {
    if (pairs.empty()) throw ContractError("context independence needs at least one pair");
    const TranslationModel model(pairs, alpha);
    double total = 0.0;
    for (std::int64_t c : model.concepts()) {
        double best_cm = -1.0;
        double best_mc = -1.0;
        for (std::int64_t m : model.messages()) {  // ascending ids
            const double cm = model.p_concept_given_message(c, m);
            const double mc = model.p_message_given_concept(m, c);
            if (best_cm < 0.0 || (cm > best_cm && !nearly_equal(cm, best_cm)) ||
                (nearly_equal(cm, best_cm) && mc > best_mc && !nearly_equal(mc, best_mc))) {
                best_cm = cm;
                best_mc = mc;
            }
        }
        total += best_cm * best_mc;
    }
    return total / static_cast<double>(model.concepts().size());
}

double causal_influence(std::span<const SymbolPair> pairs) {
    if (pairs.empty()) throw ContractError("causal influence needs at least one pair");
    std::map<SymbolPair, double> joint;
    std::map<std::int64_t, double> pm;
    std::map<std::int64_t, double> pa;
    for (const auto& [m, a] : pairs) {
        joint[{m, a}] += 1.0;
        pm[m] += 1.0;
        pa[a] += 1.0;
    }
    const double n = static_cast<double>(pairs.size());
    double mi = 0.0;
    for (const auto& [key, count] : joint) {
        const double p = count / n;
        mi += p * std::log2(count * n / (pm[key.first] * pa[key.second]));
    }
    // Rounding can leave a tiny negative residue for independent tables.
    return std::max(0.0, mi);
}

int hamming_distance(const ConceptVector& a, const ConceptVector& b) {
    return static_cast<int>((a.bits ^ b.bits).count());
}

int edit_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    std::vector<int> prev(b.size() + 1);
    std::vector<int> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double euclidean_distance(const MessageSet& a, const MessageSet& b) {
    if (a.messages.size() != b.messages.size()) {
        throw ContractError("message sets differ in shape");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.messages.size(); ++i) {
        const auto& x = a.messages[i];
        const auto& y = b.messages[i];
        if (x.size() != y.size()) throw ContractError("message sets differ in shape");
        for (std::size_t j = 0; j < x.size(); ++j) sum += (x[j] - y[j]) * (x[j] - y[j]);
    }
    return std::sqrt(sum);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractError("spearman inputs differ in length");
    if (x.size() < 2) throw ContractError("spearman needs at least two values");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(rx.size());
    const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ContractError("degenerate space");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

template <typename Message, typename Distance>
double topsim_impl(std::span<const ConceptVector> concepts, std::span<const Message> messages,
                   Distance message_distance) {
    if (concepts.size() != messages.size()) throw ContractError("concept and message lists differ in length");
    if (concepts.size() < 3) throw ContractError("topographic similarity needs at least 3 items");
    std::vector<double> dc;
    std::vector<double> dm;
    const std::size_t n = concepts.size();
    dc.reserve(n * (n - 1) / 2);
    dm.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dc.push_back(hamming_distance(concepts[i], concepts[j]));
            dm.push_back(message_distance(messages[i], messages[j]));
        }
    }
    return spearman(dc, dm);
}

}  // namespace

double topographic_similarity(std::span<const ConceptVector> concepts,
                              std::span<const std::vector<std::int64_t>> messages) {
    return topsim_impl(concepts, messages, [](const auto& a, const auto& b) {
        return static_cast<double>(edit_distance(a, b));
    });
}

double topographic_similarity(std::span<const ConceptVector> concepts,
                              std::span<const MessageSet> messages) {
    return topsim_impl(concepts, messages,
                       [](const auto& a, const auto& b) { return euclidean_distance(a, b); });
}

namespace {

// Dense ids for symbol tuples, assigned in sorted tuple order.
template <typename Key>
std::map<Key, std::int64_t> index_keys(const std::set<Key>& keys) {
    std::map<Key, std::int64_t> ids;
    std::int64_t next = 0;
    for (const auto& k : keys) ids[k] = next++;
    return ids;
}

std::map<std::vector<std::int64_t>, std::int64_t> round_ids(std::span<const TraceRecord> records) {
    std::set<std::vector<std::int64_t>> keys;
    for (const auto& r : records) {
        for (const auto& round : r.rounds) keys.insert(round);
    }
    return index_keys(keys);
}

std::array<int, 5> concept_parts(const ConceptVector& c) {
    const ConceptFields f = c.decode();
    return {f.size ? *f.size - 1 : 7, f.shape ? static_cast<int>(*f.shape) : 7,
            f.color ? static_cast<int>(*f.color) : 7, f.weight ? static_cast<int>(*f.weight) : 7,
            f.verb ? static_cast<int>(*f.verb) : 7};
}

}  // namespace

std::vector<SymbolPair> concept_message_pairs(std::span<const TraceRecord> records,
                                              SymbolView view) {
    std::vector<SymbolPair> out;
    if (view == SymbolView::kConcatenated) {
        const auto ids = round_ids(records);
        for (const auto& r : records) {
            for (const auto& round : r.rounds) {
                out.emplace_back(static_cast<std::int64_t>(r.concept_vector.symbol()), ids.at(round));
            }
        }
        return out;
    }
    std::set<SymbolPair> keys;
    for (const auto& r : records) {
        for (const auto& round : r.rounds) {
            for (std::size_t k = 0; k < std::min<std::size_t>(5, round.size()); ++k) {
                keys.insert({static_cast<std::int64_t>(k), round[k]});
            }
        }
    }
    const auto ids = index_keys(keys);
    for (const auto& r : records) {
        const auto parts = concept_parts(r.concept_vector);
        for (const auto& round : r.rounds) {
            for (std::size_t k = 0; k < std::min<std::size_t>(5, round.size()); ++k) {
                const auto c = static_cast<std::int64_t>(k * 8 + static_cast<std::size_t>(parts[k]));
                out.emplace_back(c, ids.at({static_cast<std::int64_t>(k), round[k]}));
            }
        }
    }
    return out;
}

std::vector<SymbolPair> message_action_pairs(std::span<const TraceRecord> records) {
    const auto ids = round_ids(records);
    std::vector<SymbolPair> out;
    for (const auto& r : records) {
        for (const auto& round : r.rounds) {
            for (Action a : r.actions) out.emplace_back(ids.at(round), static_cast<std::int64_t>(a));
        }
    }
    return out;
}

namespace {

template <typename Fn>
MetricValue guarded(Fn&& fn) {
    MetricValue v;
    try {
        v.value = fn();
    } catch (const Error& e) {
        v.error = e.what();
    }
    return v;
}

}  // namespace

MetricsReport evaluate_trace(std::span<const TraceRecord> records, SymbolView view, double alpha) {
    MetricsReport report;
    report.records = records.size();
    report.ci = guarded([&] {
        const auto pairs = concept_message_pairs(records, view);
        return context_independence(pairs, alpha);
    });
    report.cic = guarded([&] {
        const auto pairs = message_action_pairs(records);
        return causal_influence(pairs);
    });
    report.topsim = guarded([&] {
        std::vector<ConceptVector> concepts;
        const bool continuous = std::any_of(records.begin(), records.end(),
                                            [](const TraceRecord& r) { return !r.raw_rounds.empty(); });
        if (continuous) {
            std::vector<MessageSet> raw;
            for (const auto& r : records) {
                if (r.raw_rounds.empty()) continue;
                concepts.push_back(r.concept_vector);
                raw.push_back(r.raw_rounds.front());
            }
            return topographic_similarity(concepts, std::span<const MessageSet>(raw));
        }
        std::vector<std::vector<std::int64_t>> symbols;
        for (const auto& r : records) {
            if (r.rounds.empty()) continue;
            concepts.push_back(r.concept_vector);
            symbols.push_back(r.rounds.front());
        }
        return topographic_similarity(concepts, std::span<const std::vector<std::int64_t>>(symbols));
    });
    return report;
}

}  // namespace gridcomm
