#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "confres/errors.hpp"

namespace confres::ahp {

/// Comparisons are elicited on the 1-9 scale; reciprocals extend the range
/// down to 1/9.
inline constexpr double kScaleMin = 1.0 / 9.0;
inline constexpr double kScaleMax = 9.0;

/// Matrices with a consistency ratio above this need revision.
inline constexpr double kConsistencyLimit = 0.1;

/// Tolerance for exact-by-construction identities (reciprocity, weight sums).
inline constexpr double kEqTolerance = 1e-9;

inline double clamp_to_scale(double x) {
    return x < kScaleMin ? kScaleMin : (x > kScaleMax ? kScaleMax : x);
}

/// Positive reciprocal comparison matrix over named criteria or alternatives.
/// Stored dense row-major; dimensions stay tiny (the random-index table tops
/// out at n = 9).
class PairwiseMatrix {
public:
    PairwiseMatrix(std::vector<std::string> labels, std::vector<double> row_major)
        : labels_(std::move(labels)), entries_(std::move(row_major)) {
        if (entries_.size() != labels_.size() * labels_.size())
            throw Error("ahp", "DimensionMismatch", "entry count does not match label count");
    }

    static PairwiseMatrix uniform(std::vector<std::string> labels) {
        std::size_t n = labels.size();
        return PairwiseMatrix(std::move(labels), std::vector<double>(n * n, 1.0));
    }

    static PairwiseMatrix from_rows(std::vector<std::string> labels,
                                    const std::vector<std::vector<double>>& rows) {
        std::size_t n = labels.size();
        std::vector<double> flat;
        flat.reserve(n * n);
        if (rows.size() != n)
            throw Error("ahp", "DimensionMismatch", "row count does not match label count");
        for (const auto& row : rows) {
            if (row.size() != n)
                throw Error("ahp", "DimensionMismatch", "ragged matrix row");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return PairwiseMatrix(std::move(labels), std::move(flat));
    }

    /// a_ij = w_i / w_j: the perfectly consistent matrix for a weight vector.
    static PairwiseMatrix consistent_from_weights(std::vector<std::string> labels,
                                                  const std::vector<double>& w) {
        std::size_t n = labels.size();
        std::vector<double> flat(n * n, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = w[i] / w[j];
        return PairwiseMatrix(std::move(labels), std::move(flat));
    }

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& entries() const { return entries_; }

    double at(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }

    /// Sets a_ij and keeps the matrix reciprocal (a_ji = 1/v, a_ii untouched).
    void set_pair(std::size_t i, std::size_t j, double v) {
        if (i == j) return;
        entries_[i * size() + j] = v;
        entries_[j * size() + i] = 1.0 / v;
    }

    std::vector<std::vector<double>> rows() const {
        std::size_t n = size();
        std::vector<std::vector<double>> out(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i][j] = at(i, j);
        return out;
    }

    /// Applies a label permutation: row/column k of the result is row/column
    /// perm[k] of this matrix.
    PairwiseMatrix permuted(const std::vector<std::size_t>& perm) const {
        std::size_t n = size();
        std::vector<std::string> labels(n);
        std::vector<double> flat(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = labels_[perm[i]];
            for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = at(perm[i], perm[j]);
        }
        return PairwiseMatrix(std::move(labels), std::move(flat));
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> entries_;  // row-major
};

inline std::optional<Error> validate_pairwise(const PairwiseMatrix& m) {
    std::size_t n = m.size();
    if (n == 0) return Error("ahp", "DimensionMismatch", "empty matrix");
    for (std::size_t i = 0; i < n; ++i) {
        if (m.at(i, i) != 1.0)
            return Error("ahp", "BadDiagonal",
                         "a[" + std::to_string(i) + "][" + std::to_string(i) + "] != 1");
        for (std::size_t j = 0; j < n; ++j) {
            if (!(m.at(i, j) > 0.0))
                return Error("ahp", "NonPositive",
                             "a[" + std::to_string(i) + "][" + std::to_string(j) + "] <= 0");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(m.at(i, j) * m.at(j, i) - 1.0) > kEqTolerance)
                return Error("ahp", "NonReciprocal",
                             "a[" + std::to_string(i) + "][" + std::to_string(j) + "] * a[" +
                                 std::to_string(j) + "][" + std::to_string(i) + "] != 1");
    return std::nullopt;
}

/// Expected consistency index of random reciprocal matrices, by dimension.
/// Dimensions beyond the table are unsupported.
class RandomIndexTable {
public:
    static RandomIndexTable standard() {
        return RandomIndexTable({{1, 0.0},
                                 {2, 0.0},
                                 {3, 0.52},
                                 {4, 0.9},
                                 {5, 1.12},
                                 {6, 1.24},
                                 {7, 1.32},
                                 {8, 1.41},
                                 {9, 1.45}});
    }

    explicit RandomIndexTable(std::map<int, double> values) : values_(std::move(values)) {}

    bool contains(std::size_t n) const { return values_.count(int(n)) != 0; }

    double at(std::size_t n) const {
        auto it = values_.find(int(n));
        if (it == values_.end())
            throw Error("ahp", "UnsupportedDimension",
                        "no random index for n = " + std::to_string(n));
        return it->second;
    }

    const std::map<int, double>& values() const { return values_; }

private:
    std::map<int, double> values_;
};

/// Weight vector plus the full consistency diagnostics behind it.
struct PrioritizationResult {
    std::vector<std::string> labels;
    std::vector<double> gm_vector;           // row geometric means
    std::vector<double> weights;             // normalized, sums to 1
    std::vector<double> weighted_sum;        // A * W
    std::vector<double> consistency_vector;  // elementwise S / W
    double lambda_max = 0;
    double ci = 0;
    double cr = 0;
};

/// Row-wise geometric means: X_k = (prod_j a_kj)^(1/n).
inline std::vector<double> geometric_mean_vector(const PairwiseMatrix& m) {
    std::size_t n = m.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double product = 1.0;
        for (std::size_t j = 0; j < n; ++j) product *= m.at(i, j);
        x[i] = std::pow(product, 1.0 / double(n));
    }
    return x;
}

inline std::vector<double> normalize_weights(const std::vector<double>& x) {
    double sum = 0;
    for (double v : x) sum += v;
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = x[i] / sum;
    return w;
}

inline std::vector<double> weighted_sum_vector(const PairwiseMatrix& m,
                                               const std::vector<double>& w) {
    std::size_t n = m.size();
    if (w.size() != n)
        throw Error("ahp", "DimensionMismatch", "weight vector does not match matrix dimension");
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s[i] += m.at(i, j) * w[j];
    return s;
}

inline std::vector<double> consistency_vector(const std::vector<double>& s,
                                              const std::vector<double>& w) {
    std::vector<double> cv(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) cv[i] = s[i] / w[i];
    return cv;
}

inline double lambda_max(const std::vector<double>& cv) {
    double sum = 0;
    for (double v : cv) sum += v;
    return sum / double(cv.size());
}

/// CI = (lambda - n) / (n - 1); defined as 0 for n < 2.
inline double consistency_index(double lambda, std::size_t n) {
    if (n < 2) return 0.0;
    return (lambda - double(n)) / (double(n) - 1.0);
}

/// CR = CI / RI(n); defined as 0 where RI(n) = 0 (n <= 2).
inline double consistency_ratio(double ci, std::size_t n, const RandomIndexTable& ri_table) {
    double ri = ri_table.at(n);
    if (ri == 0.0) return 0.0;
    return ci / ri;
}

/// Runs the full weight/consistency chain with no acceptance gate.
inline PrioritizationResult evaluate(const PairwiseMatrix& m, const RandomIndexTable& ri_table) {
    if (auto err = validate_pairwise(m)) throw *err;
    PrioritizationResult r;
    r.labels = m.labels();
    r.gm_vector = geometric_mean_vector(m);
    r.weights = normalize_weights(r.gm_vector);
    r.weighted_sum = weighted_sum_vector(m, r.weights);
    r.consistency_vector = consistency_vector(r.weighted_sum, r.weights);
    r.lambda_max = lambda_max(r.consistency_vector);
    r.ci = consistency_index(r.lambda_max, m.size());
    r.cr = consistency_ratio(r.ci, m.size(), ri_table);
    return r;
}

/// Thrown when a matrix fails the CR <= 0.1 gate; carries the diagnostics so
/// callers can report the offending values.
class InconsistentMatrix : public Error {
public:
    explicit InconsistentMatrix(PrioritizationResult diag)
        : Error("ahp", "InconsistentMatrix",
                "consistency ratio " + std::to_string(diag.cr) + " exceeds " +
                    std::to_string(kConsistencyLimit)),
          diagnostics(std::move(diag)) {}

    PrioritizationResult diagnostics;
};

/// Gated prioritization: the result is only usable when CR <= 0.1.
inline PrioritizationResult prioritize(const PairwiseMatrix& m, const RandomIndexTable& ri_table) {
    PrioritizationResult r = evaluate(m, ri_table);
    if (r.cr > kConsistencyLimit) throw InconsistentMatrix(std::move(r));
    return r;
}

/// One revision round: replaces every entry with the geometric mean of
/// itself and w_i/w_j, the corresponding entry of the weight-consistent
/// completion. A consistent matrix is a fixed point.
inline PairwiseMatrix revise_step(const PairwiseMatrix& m, const std::vector<double>& weights) {
    PairwiseMatrix out = m;
    std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double target = weights[i] / weights[j];
            out.set_pair(i, j, std::sqrt(m.at(i, j) * target));
        }
    return out;
}

/// Nudges an inconsistent matrix toward its weight-consistent completion,
/// re-prioritizing after each revise_step. The per-round contraction brings
/// even a fully cyclic 3x3 under the gate in three rounds.
inline PairwiseMatrix revise_matrix(const PairwiseMatrix& m, const RandomIndexTable& ri_table,
                                    int max_iters) {
    PairwiseMatrix current = m;
    PrioritizationResult diag = evaluate(current, ri_table);
    for (int iter = 0; iter < max_iters && diag.cr > kConsistencyLimit; ++iter) {
        current = revise_step(current, diag.weights);
        diag = evaluate(current, ri_table);
    }
    if (diag.cr > kConsistencyLimit)
        throw Error("ahp", "RevisionDiverged",
                    "consistency ratio " + std::to_string(diag.cr) + " still exceeds " +
                        std::to_string(kConsistencyLimit) + " after " + std::to_string(max_iters) +
                        " iterations");
    return current;
}

/// Entrywise geometric mean across judges; reciprocal by construction.
inline PairwiseMatrix aggregate_group(std::span<const PairwiseMatrix> ms) {
    if (ms.empty()) throw Error("ahp", "DimensionMismatch", "no matrices to aggregate");
    const auto& first = ms.front();
    std::size_t n = first.size();
    for (const auto& m : ms) {
        if (m.size() != n || m.labels() != first.labels())
            throw Error("ahp", "DimensionMismatch", "matrices differ in dimension or labels");
    }
    PairwiseMatrix out = PairwiseMatrix::uniform(first.labels());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double product = 1.0;
            for (const auto& m : ms) product *= m.at(i, j);
            out.set_pair(i, j, std::pow(product, 1.0 / double(ms.size())));
        }
    return out;
}

inline PairwiseMatrix aggregate_group(const std::vector<PairwiseMatrix>& ms) {
    return aggregate_group(std::span<const PairwiseMatrix>(ms.data(), ms.size()));
}

}  // namespace confres::ahp
