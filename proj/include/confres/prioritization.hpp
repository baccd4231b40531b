#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confres/ahp.hpp"
#include "confres/domain.hpp"
#include "confres/errors.hpp"

namespace confres {

/// The four contextual criteria, in canonical order.
enum class Criterion { Age, VI, HI, Illness };

inline constexpr std::array<Criterion, 4> kCriteria = {Criterion::Age, Criterion::VI,
                                                       Criterion::HI, Criterion::Illness};

inline std::string criterion_name(Criterion c) {
    switch (c) {
        case Criterion::Age: return "Age";
        case Criterion::VI: return "VI";
        case Criterion::HI: return "HI";
        case Criterion::Illness: return "Illness";
    }
    return "Age";
}

inline std::vector<std::string> criteria_labels() { return {"Age", "VI", "HI", "Illness"}; }

inline int criterion_value(const ResidentProfile& p, Criterion c) {
    switch (c) {
        case Criterion::Age: return p.age;
        case Criterion::VI: return p.visual_impairment;
        case Criterion::HI: return p.hearing_impairment;
        case Criterion::Illness: return p.illness;
    }
    return 0;
}

struct CriteriaTemplate {
    ConflictType conflict_type = ConflictType::Other;
    ahp::PairwiseMatrix matrix = ahp::PairwiseMatrix::uniform(criteria_labels());
};

/// Built-in criteria matrices. Temperature emphasizes illness; the
/// illumination and audio matrices are role swaps of the same judgment
/// pattern emphasizing VI and HI respectively (so their consistency ratio is
/// identical by permutation invariance). Everything else falls back to equal
/// importance.
inline ahp::PairwiseMatrix default_criteria_matrix(ConflictType type) {
    const double k3 = 1.0 / 3.0, k5 = 1.0 / 5.0, k7 = 1.0 / 7.0;
    ahp::PairwiseMatrix illness_emphasis = ahp::PairwiseMatrix::from_rows(
        criteria_labels(), {{1, k3, k3, k7}, {3, 1, 1, k5}, {3, 1, 1, k5}, {7, 5, 5, 1}});
    auto swapped = [&](std::size_t a, std::size_t b) {
        std::vector<std::size_t> perm = {0, 1, 2, 3};
        std::swap(perm[a], perm[b]);
        ahp::PairwiseMatrix m = illness_emphasis.permuted(perm);
        return ahp::PairwiseMatrix(criteria_labels(), m.entries());
    };
    switch (type) {
        case ConflictType::Temperature: return illness_emphasis;
        case ConflictType::Illumination: return swapped(1, 3);  // VI takes the illness role
        case ConflictType::Audio: return swapped(2, 3);         // HI takes the illness role
        case ConflictType::Other: break;
    }
    return ahp::PairwiseMatrix::uniform(criteria_labels());
}

/// Optional per-conflict-type template overrides loaded from config.
using TemplateOverrides = std::map<ConflictType, ahp::PairwiseMatrix>;

/// Selects (and gates) the criteria matrix for a conflict type. Overrides
/// must pass both reciprocity validation and the CR gate.
inline CriteriaTemplate criteria_matrix_for(ConflictType type, const ahp::RandomIndexTable& ri,
                                            const TemplateOverrides* overrides = nullptr) {
    if (overrides) {
        auto it = overrides->find(type);
        if (it != overrides->end()) {
            if (auto err = ahp::validate_pairwise(it->second))
                throw Error("prioritization", "InvalidOverride", err->what());
            ahp::PrioritizationResult diag = ahp::evaluate(it->second, ri);
            if (diag.cr > ahp::kConsistencyLimit)
                throw Error("prioritization", "InvalidOverride",
                            "override for " + conflict_type_name(type) + " has CR " +
                                std::to_string(diag.cr) + " > " +
                                std::to_string(ahp::kConsistencyLimit));
            return {type, it->second};
        }
    }
    return {type, default_criteria_matrix(type)};
}

inline constexpr double kDefaultScoreDelta = 1.0;

/// Builds the alternatives matrix for one criterion from raw profile values:
/// a_ij = clamp((v_i + delta) / (v_j + delta)) on the 1/9..9 scale. The
/// smoothing delta keeps zero severities comparable; higher raw value means
/// higher priority. Reciprocity holds exactly because the clamped upper
/// entry defines its mirror.
inline ahp::PairwiseMatrix score_residents(const std::vector<ResidentProfile>& profiles,
                                           Criterion criterion,
                                           double delta = kDefaultScoreDelta) {
    if (profiles.empty())
        throw Error("prioritization", "NoParticipants", "no profiles to score");
    std::vector<std::string> labels;
    labels.reserve(profiles.size());
    for (const auto& p : profiles) labels.push_back(p.resident_id);
    ahp::PairwiseMatrix m = ahp::PairwiseMatrix::uniform(std::move(labels));
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = i + 1; j < profiles.size(); ++j) {
            double vi = double(criterion_value(profiles[i], criterion)) + delta;
            double vj = double(criterion_value(profiles[j], criterion)) + delta;
            m.set_pair(i, j, ahp::clamp_to_scale(vi / vj));
        }
    return m;
}

/// Everything behind a ranking, for audit output: the criteria-level result
/// plus one alternatives-level result per criterion.
struct RankingDiagnostics {
    ahp::PrioritizationResult criteria;
    std::vector<std::pair<Criterion, ahp::PrioritizationResult>> alternatives;
};

/// Ranks the participants of a conflict: criteria weights from the
/// conflict-type template, per-criterion alternative weights from profile
/// scores, synthesized by weighted sum and normalized. Ties break by
/// resident id.
inline std::vector<ResidentWeight> rank_residents(const ConflictCase& conflict,
                                                  const ProfileMap& profiles,
                                                  const ahp::RandomIndexTable& ri,
                                                  const TemplateOverrides* overrides = nullptr,
                                                  RankingDiagnostics* diagnostics = nullptr,
                                                  double delta = kDefaultScoreDelta) {
    std::vector<ResidentProfile> participants;
    participants.reserve(conflict.participants.size());
    for (const auto& p : conflict.participants) {
        auto it = profiles.find(p.resident_id);
        if (it == profiles.end())
            throw Error("prioritization", "UnknownResident",
                        "participant '" + p.resident_id + "' has no profile");
        participants.push_back(it->second);
    }

    CriteriaTemplate tmpl = criteria_matrix_for(conflict.conflict_type, ri, overrides);
    ahp::PrioritizationResult criteria = ahp::prioritize(tmpl.matrix, ri);

    std::vector<double> raw(participants.size(), 0.0);
    RankingDiagnostics diag;
    diag.criteria = criteria;
    for (std::size_t c = 0; c < kCriteria.size(); ++c) {
        ahp::PairwiseMatrix alt = score_residents(participants, kCriteria[c], delta);
        ahp::PrioritizationResult alt_result = ahp::prioritize(alt, ri);
        for (std::size_t i = 0; i < participants.size(); ++i)
            raw[i] += criteria.weights[c] * alt_result.weights[i];
        diag.alternatives.emplace_back(kCriteria[c], std::move(alt_result));
    }
    if (diagnostics) *diagnostics = std::move(diag);

    double total = 0;
    for (double r : raw) total += r;
    std::vector<ResidentWeight> ranking(participants.size());
    for (std::size_t i = 0; i < participants.size(); ++i) {
        ranking[i].resident_id = participants[i].resident_id;
        ranking[i].raw_weight = raw[i];
        ranking[i].normalized_weight = raw[i] / total;
    }
    std::sort(ranking.begin(), ranking.end(), [](const ResidentWeight& a, const ResidentWeight& b) {
        if (a.normalized_weight != b.normalized_weight)
            return a.normalized_weight > b.normalized_weight;
        return a.resident_id < b.resident_id;
    });
    for (std::size_t i = 0; i < ranking.size(); ++i) ranking[i].rank = int(i) + 1;
    return ranking;
}

}  // namespace confres
