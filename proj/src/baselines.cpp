#include "memepred/baselines.hpp"
#include "memepred/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace memepred {

RandomGuess::RandomGuess(std::map<int, double> priors, std::uint64_t seed) : rng_(derive_seed(seed, "random-guess")) {
    if (priors.empty()) throw DomainError("random guess needs at least one class prior");
    double total = 0.0;
    for (auto [label, p] : priors) {
        if (!(p >= 0.0)) throw DomainError("negative prior for class " + std::to_string(label));
        total += p;
        classes_.push_back(label);
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("class priors must sum to 1");
}

int RandomGuess::draw() {
    const double u = rng_.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), classes_.size() - 1);
    return classes_[idx];
}

std::vector<int> RandomGuess::draw(std::size_t count) {
    std::vector<int> out(count);
    for (auto& c : out) c = draw();
    return out;
}

std::map<int, double> RandomGuess::priors_of(std::span<const int> labels) {
    if (labels.empty()) throw DomainError("cannot derive priors from no labels");
    std::map<int, double> priors;
    for (int l : labels) priors[l] += 1.0;
    for (auto& [label, p] : priors) p /= static_cast<double>(labels.size());
    return priors;
}

MajorityGuess::MajorityGuess(std::span<const int> training_labels) {
    if (training_labels.empty()) throw DomainError("majority guess needs training labels");
    std::map<int, std::size_t> counts;
    for (int l : training_labels) ++counts[l];
    std::size_t best = 0;
    for (auto [label, count] : counts) {
        if (count > best) {
            best = count;
            label_ = label;
        }
    }
}

double LinearModel::predict(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != coefficients.size()) {
        throw DomainError("feature dimension " + std::to_string(x.size()) + " differs from model dimension " +
                          std::to_string(coefficients.size()));
    }
    double y = intercept;
    for (std::size_t j = 0; j < x.size(); ++j) y += coefficients[static_cast<Eigen::Index>(j)] * x[j];
    return y;
}

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != coefficients.size()) throw DomainError("design matrix width differs from model dimension");
    return (X * coefficients).array() + intercept;
}

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto rows = X.rows();
    const auto cols = X.cols();
    if (y.size() != rows) throw DomainError("target length differs from design rows");
    if (rows <= cols) {
        throw DomainError("least squares needs more rows (" + std::to_string(rows) + ") than columns (" +
                          std::to_string(cols) + ")");
    }
    if (!X.allFinite() || !y.allFinite()) throw DomainError("least squares input has non-finite entries");

    // Centering removes the intercept; exactly constant columns become zero.
    Eigen::MatrixXd Xc(rows, cols);
    Eigen::VectorXd x_mean(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const auto col = X.col(j);
        const bool constant = (col.array() == col(0)).all();
        x_mean(j) = constant ? col(0) : col.mean();
        Xc.col(j) = constant ? Eigen::VectorXd::Zero(rows) : Eigen::VectorXd(col.array() - x_mean(j));
    }
    const bool y_constant = (y.array() == y(0)).all();
    const double y_mean = y_constant ? y(0) : y.mean();
    const Eigen::VectorXd yc = y_constant ? Eigen::VectorXd::Zero(rows) : Eigen::VectorXd(y.array() - y_mean);

    LinearModel model;
    model.coefficients = Eigen::VectorXd::Zero(cols);
    if (cols > 0) {
        const Eigen::MatrixXd gram = Xc.transpose() * Xc;
        const Eigen::VectorXd rhs = Xc.transpose() * yc;

        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        const auto d = ldlt.vectorD().cwiseAbs();
        const double scale = std::max(d.maxCoeff(), 1e-300);
        const bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() || d.minCoeff() <= 1e-12 * scale;

        if (!singular) {
            model.coefficients = ldlt.solve(rhs);
        } else {
            const double ridge = 1e-8 * std::max(1.0, gram.trace() / static_cast<double>(cols));
            Eigen::MatrixXd regularized = gram;
            regularized.diagonal().array() += ridge;
            Eigen::LLT<Eigen::MatrixXd> llt(regularized);
            if (llt.info() != Eigen::Success) throw DomainError("design matrix is degenerate even with ridge");
            model.coefficients = llt.solve(rhs);
            model.ridge_used = true;
        }
        if (!model.coefficients.allFinite()) throw DomainError("least squares produced non-finite coefficients");
    }
    model.intercept = y_mean - x_mean.dot(model.coefficients);
    return model;
}

SummaryStats summarize(std::vector<double> values) {
    SummaryStats s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    s.max = values.back();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(m);
    s.median = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
    if (m >= 2 && s.mean != 0.0) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.cv = std::sqrt(ss / static_cast<double>(m - 1)) / s.mean;
    }
    return s;
}

std::array<double, 8> InfluenceFeatures::to_array() const {
    return {pagerank.max, pagerank.mean, pagerank.median, pagerank.cv,
            followers.max, followers.mean, followers.median, followers.cv};
}

InfluenceFeatures influence_features(std::span<const NodeId> adopters, std::span<const double> pagerank,
                                     std::span<const double> follower_counts) {
    std::vector<double> pr, fol;
    pr.reserve(adopters.size());
    fol.reserve(adopters.size());
    for (NodeId a : adopters) {
        if (a >= pagerank.size() || a >= follower_counts.size()) throw DomainError("adopter id out of range");
        pr.push_back(pagerank[a]);
        fol.push_back(std::log10(1.0 + follower_counts[a]));
    }
    return {summarize(std::move(pr)), summarize(std::move(fol))};
}

std::vector<double> degree_follower_counts(const Network& net) {
    std::vector<double> counts(net.node_count());
    for (NodeId v = 0; v < net.node_count(); ++v) counts[v] = static_cast<double>(net.degree(v));
    return counts;
}

void apply_follower_file(std::istream& in, const Network& net, std::vector<double>& counts) {
    counts.resize(net.node_count(), 0.0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string user;
        double count = 0.0;
        if (!(fields >> user >> count) || count < 0.0) throw ParseError(line_no, "expected user<TAB>follower_count");
        if (auto id = net.find(user)) counts[*id] = count;
    }
}

std::size_t early_popularity(const Meme& meme, std::int64_t tau_seconds) {
    if (meme.events.empty()) return 0;
    const auto t0 = meme.first_timestamp();
    return static_cast<std::size_t>(std::count_if(meme.events.begin(), meme.events.end(),
                                                  [&](const AdoptionEvent& e) { return e.timestamp - t0 < tau_seconds; }));
}

std::vector<std::size_t> daily_counts(const Meme& meme, int tau_days) {
    if (tau_days < 1) throw DomainError("tau must be at least one day");
    std::vector<std::size_t> counts(static_cast<std::size_t>(tau_days), 0);
    if (meme.events.empty()) return counts;
    const auto t0 = meme.first_timestamp();
    for (const auto& e : meme.events) {
        const auto day = (e.timestamp - t0) / 86400;
        if (day < tau_days) ++counts[static_cast<std::size_t>(day)];
    }
    return counts;
}

LogPopularityRegressor LogPopularityRegressor::fit(const Eigen::MatrixXd& X, std::span<const std::size_t> popularity,
                                                   ClassBinning binning) {
    if (static_cast<Eigen::Index>(popularity.size()) != X.rows()) throw DomainError("target count differs from rows");
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const auto p = popularity[static_cast<std::size_t>(i)];
        if (p < 1) throw DomainError("popularity must be >= 1");
        y(i) = std::log10(static_cast<double>(p));
    }
    return LogPopularityRegressor(fit_ols(X, y), std::move(binning));
}

Eigen::MatrixXd influence_design(std::span<const InfluenceFeatures> rows) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 8);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto a = rows[i].to_array();
        for (Eigen::Index j = 0; j < 8; ++j) X(static_cast<Eigen::Index>(i), j) = a[static_cast<std::size_t>(j)];
    }
    return X;
}

Eigen::MatrixXd ln_design(std::span<const std::size_t> early, std::vector<std::size_t>* excluded) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(early.size()), 1);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < early.size(); ++i) {
        if (early[i] == 0) {
            ++zeros;
            if (excluded) excluded->push_back(i);
        }
        X(static_cast<Eigen::Index>(i), 0) = std::log10(static_cast<double>(std::max<std::size_t>(early[i], 1)));
    }
    if (zeros > 0) warn(std::to_string(zeros) + " memes have zero early popularity and are excluded from LN fitting");
    return X;
}

Eigen::MatrixXd ml_design(std::span<const std::vector<std::size_t>> daily) {
    const auto days = daily.empty() ? 0 : static_cast<Eigen::Index>(daily.front().size());
    Eigen::MatrixXd X(static_cast<Eigen::Index>(daily.size()), days);
    for (std::size_t i = 0; i < daily.size(); ++i) {
        if (static_cast<Eigen::Index>(daily[i].size()) != days) throw DomainError("daily vectors differ in length");
        for (Eigen::Index d = 0; d < days; ++d) {
            X(static_cast<Eigen::Index>(i), d) = std::log10(1.0 + static_cast<double>(daily[i][static_cast<std::size_t>(d)]));
        }
    }
    return X;
}

} // namespace memepred
