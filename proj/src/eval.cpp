#include "memepred/eval.hpp"
#include "memepred/errors.hpp"
#include "memepred/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace memepred {

int bin(std::uint64_t popularity, int cap) {
    if (popularity < 1) throw DomainError("popularity must be >= 1");
    if (cap < 1) throw DomainError("class cap must be >= 1");
    // Class k holds p in (10^(k-1.5), 10^(k-0.5)], i.e. the smallest k with
    // p^2 <= 10^(2k-1).
    const unsigned __int128 sq = static_cast<unsigned __int128>(popularity) * popularity;
    unsigned __int128 bound = 10;
    int k = 1;
    while (sq > bound && k < cap) {
        bound *= 100;
        ++k;
    }
    return k;
}

int ClassBinning::bin(std::uint64_t popularity) const {
    if (upper_edges.empty()) return memepred::bin(popularity, cap);
    if (popularity < 1) throw DomainError("popularity must be >= 1");
    const auto p = static_cast<double>(popularity);
    int k = first_class;
    for (double edge : upper_edges) {
        if (p <= edge) break;
        ++k;
    }
    return std::min(k, cap);
}

int ClassBinning::bin_log10(double log_popularity) const {
    if (std::isnan(log_popularity)) throw DomainError("predicted popularity is NaN");
    if (upper_edges.empty()) {
        const double k = std::ceil(log_popularity + 0.5);
        if (k < 1.0) return 1;
        if (k > cap) return cap;
        return static_cast<int>(k);
    }
    int k = first_class;
    for (double edge : upper_edges) {
        if (log_popularity <= std::log10(edge)) break;
        ++k;
    }
    return std::min(k, cap);
}

const ClassMetrics* ClassReport::find(int label) const {
    for (const auto& m : metrics) {
        if (m.label == label) return &m;
    }
    return nullptr;
}

double ClassReport::f1_of(int label) const {
    const auto* m = find(label);
    return m ? m->f1 : 0.0;
}

double ClassReport::accuracy() const {
    std::size_t correct = 0, total = 0;
    for (std::size_t i = 0; i < confusion.size(); ++i) {
        for (std::size_t j = 0; j < confusion[i].size(); ++j) {
            total += confusion[i][j];
            if (i == j) correct += confusion[i][j];
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

ClassReport f1_report(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size()) {
        throw DomainError("prediction count " + std::to_string(predicted.size()) + " differs from label count " +
                          std::to_string(actual.size()));
    }
    ClassReport report;
    report.classes.assign(actual.begin(), actual.end());
    report.classes.insert(report.classes.end(), predicted.begin(), predicted.end());
    std::sort(report.classes.begin(), report.classes.end());
    report.classes.erase(std::unique(report.classes.begin(), report.classes.end()), report.classes.end());

    const std::size_t k = report.classes.size();
    auto index_of = [&](int label) {
        return static_cast<std::size_t>(std::lower_bound(report.classes.begin(), report.classes.end(), label) -
                                        report.classes.begin());
    };
    report.confusion.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < actual.size(); ++i) ++report.confusion[index_of(actual[i])][index_of(predicted[i])];

    for (std::size_t c = 0; c < k; ++c) {
        ClassMetrics m;
        m.label = report.classes[c];
        const std::size_t tp = report.confusion[c][c];
        for (std::size_t j = 0; j < k; ++j) {
            m.support += report.confusion[c][j];
            m.predicted += report.confusion[j][c];
        }
        m.precision = m.predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(m.predicted);
        m.recall = m.support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(m.support);
        const double denom = m.precision + m.recall;
        m.f1 = denom == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / denom;
        report.metrics.push_back(m);
    }
    return report;
}

void write_report_csv(const ClassReport& report, std::ostream& out) {
    out << "class,precision,recall,f1,support\n";
    for (const auto& m : report.metrics) {
        out << m.label << ',' << m.precision << ',' << m.recall << ',' << m.f1 << ',' << m.support << '\n';
    }
}

void write_confusion_csv(const ClassReport& report, std::ostream& out) {
    out << "actual\\predicted";
    for (int c : report.classes) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < report.classes.size(); ++i) {
        out << report.classes[i];
        for (auto v : report.confusion[i]) out << ',' << v;
        out << '\n';
    }
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
    if (folds < 2) throw DomainError("need at least two folds");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    std::vector<int> fold_of(labels.size(), 0);
    int cursor = 0;
    for (auto& [label, members] : by_class) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(label))));
        for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
        for (std::size_t idx : members) {
            fold_of[idx] = cursor;
            cursor = (cursor + 1) % folds;
        }
    }
    return fold_of;
}

std::uint64_t fold_hash(std::span<const int> fold_of) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int f : fold_of) {
        h ^= static_cast<std::uint64_t>(f) + 1;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

int majority_of(std::span<const int> labels, std::span<const std::size_t> rows) {
    std::map<int, std::size_t> counts;
    for (auto r : rows) ++counts[labels[r]];
    int best = 0;
    std::size_t best_count = 0;
    for (auto [label, count] : counts) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

} // namespace

CrossValidation cross_validate(std::span<const int> labels, const FoldClassifier& classifier,
                               std::span<const int> fold_of) {
    if (fold_of.size() != labels.size()) throw DomainError("fold assignment size differs from label count");
    CrossValidation cv;
    cv.fold_of.assign(fold_of.begin(), fold_of.end());
    cv.hash = fold_hash(fold_of);
    cv.predictions.assign(labels.size(), 0);
    const int folds = labels.empty() ? 0 : *std::max_element(fold_of.begin(), fold_of.end()) + 1;

    std::vector<std::string> notes;
    bool degenerate = false;
    std::map<int, std::size_t> class_counts;
    for (int l : labels) ++class_counts[l];
    for (auto [label, count] : class_counts) {
        if (count < static_cast<std::size_t>(folds)) {
            notes.push_back("class " + std::to_string(label) + " has " + std::to_string(count) +
                            " members, fewer than " + std::to_string(folds) + " folds");
        }
    }
    if (class_counts.size() < 2) {
        degenerate = true;
        notes.push_back("labels contain fewer than two classes");
    }

    std::vector<std::size_t> train, test;
    for (int f = 0; f < folds; ++f) {
        train.clear();
        test.clear();
        for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[i] == f ? test : train).push_back(i);
        if (test.empty()) continue;

        std::vector<int> out;
        try {
            if (train.empty()) throw DomainError("empty training fold");
            out = classifier(train, test, derive_seed(cv.hash, static_cast<std::uint64_t>(f)));
            if (out.size() != test.size()) throw DomainError("classifier returned wrong prediction count");
        } catch (const std::exception& e) {
            degenerate = true;
            notes.push_back("fold " + std::to_string(f) + ": " + e.what() + "; majority fallback");
            const int fallback = train.empty() ? majority_of(labels, test) : majority_of(labels, train);
            out.assign(test.size(), fallback);
        }
        for (std::size_t i = 0; i < test.size(); ++i) cv.predictions[test[i]] = out[i];
    }

    cv.report = f1_report(cv.predictions, labels);
    cv.report.degenerate = degenerate;
    cv.report.notes = std::move(notes);
    for (const auto& note : cv.report.notes) warn(note);
    return cv;
}

CrossValidation cross_validate(std::span<const int> labels, const FoldClassifier& classifier, int folds,
                               std::uint64_t seed) {
    const auto fold_of = stratified_folds(labels, folds, seed);
    return cross_validate(labels, classifier, fold_of);
}

} // namespace memepred
