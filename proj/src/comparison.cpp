#include "scopetrack/comparison.hpp"

#include "scopetrack/validate.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <tuple>

namespace scopetrack {

namespace {

int segment_column(Label segment) {
    return *segment.anatomical_index();
}

void count_into(AnomalyCounts& counts, Label label) {
    switch (label.code()) {
        case LabelCode::Polyp: ++counts.polyp; break;
        case LabelCode::Ibd: ++counts.ibd; break;
        case LabelCode::BloodClot: ++counts.blood_clot; break;
        default: break;
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string time_cell(const std::optional<double>& s) {
    if (!s) return "—";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", *s);
    return buf;
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

struct Item {
    std::size_t index;
    int distance;
};

using Pair = std::pair<std::size_t, std::size_t>;  // positions into the item lists

struct Score {
    int count = 0;
    long long total = 0;

    friend bool operator==(const Score&, const Score&) = default;
};

bool better(const Score& a, const Score& b) {
    return a.count > b.count || (a.count == b.count && a.total < b.total);
}

// Items sorted by distance. An optimal matching of points on a line never
// needs crossing pairs, so a DP over the two sorted lists suffices.
std::vector<Pair> optimal_pairs(const std::vector<Item>& left, const std::vector<Item>& right, int threshold) {
    const std::size_t nl = left.size();
    const std::size_t nr = right.size();
    std::vector<Score> best((nl + 1) * (nr + 1));
    auto at = [&](std::size_t i, std::size_t j) -> Score& { return best[i * (nr + 1) + j]; };
    auto delta = [&](std::size_t i, std::size_t j) { return std::abs(left[i].distance - right[j].distance); };

    for (std::size_t i = nl + 1; i-- > 0;) {
        for (std::size_t j = nr + 1; j-- > 0;) {
            if (i == nl || j == nr) {
                at(i, j) = Score{};
                continue;
            }
            Score s = at(i + 1, j);
            if (better(at(i, j + 1), s)) s = at(i, j + 1);
            if (delta(i, j) <= threshold) {
                const Score m{at(i + 1, j + 1).count + 1, at(i + 1, j + 1).total + delta(i, j)};
                if (better(m, s)) s = m;
            }
            at(i, j) = s;
        }
    }

    // Walk the optimum. Ties prefer pairing; between two skips the item with
    // the smaller distance is dropped, which keeps the result mirror-symmetric
    // when left and right are swapped.
    std::vector<Pair> pairs;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < nl && j < nr) {
        const Score target = at(i, j);
        if (delta(i, j) <= threshold) {
            const Score m{at(i + 1, j + 1).count + 1, at(i + 1, j + 1).total + delta(i, j)};
            if (m == target) {
                pairs.emplace_back(i++, j++);
                continue;
            }
        }
        const bool skip_left_ok = at(i + 1, j) == target;
        const bool skip_right_ok = at(i, j + 1) == target;
        if (skip_left_ok && skip_right_ok) {
            if (left[i].distance <= right[j].distance) {
                ++i;
            } else {
                ++j;
            }
        } else if (skip_left_ok) {
            ++i;
        } else {
            ++j;
        }
    }
    return pairs;
}

std::vector<Pair> nearest_first_pairs(const std::vector<Item>& left, const std::vector<Item>& right, int threshold) {
    struct Candidate {
        int abs_delta;
        int left_distance;
        int right_distance;
        std::size_t i;
        std::size_t j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < left.size(); ++i) {
        for (std::size_t j = 0; j < right.size(); ++j) {
            const int d = std::abs(left[i].distance - right[j].distance);
            if (d <= threshold) candidates.push_back({d, left[i].distance, right[j].distance, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.abs_delta, a.left_distance, a.right_distance, a.i, a.j) <
               std::tie(b.abs_delta, b.left_distance, b.right_distance, b.i, b.j);
    });
    std::vector<bool> used_left(left.size());
    std::vector<bool> used_right(right.size());
    std::vector<Pair> pairs;
    for (const auto& c : candidates) {
        if (used_left[c.i] || used_right[c.j]) continue;
        used_left[c.i] = used_right[c.j] = true;
        pairs.emplace_back(c.i, c.j);
    }
    return pairs;
}

using GroupKey = std::pair<Label, std::optional<Label>>;

struct Group {
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
};

}  // namespace

std::string_view to_string(MatchStatus s) noexcept {
    switch (s) {
        case MatchStatus::Matched: return "Matched";
        case MatchStatus::OnlyLeft: return "OnlyLeft";
        case MatchStatus::OnlyRight: return "OnlyRight";
    }
    return "?";
}

CaseSummary summarize_case(const Timeline& timeline) {
    require_valid(timeline);
    CaseSummary s;
    s.procedure_id = timeline.procedure_id;
    for (auto& f : derive_findings(timeline)) {
        s.anomalies.push_back(AnomalyRecord{f.annotation_id, f.anomaly_label, f.segment, f.distance_cm,
                                            std::move(f.compound_attributes)});
        ++s.counts_by_segment[f.segment][f.anomaly_label];
    }
    s.phase_times = compute_phase_times(timeline);
    s.complete = s.phase_times.complete;
    return s;
}

int ComparisonRow::total() const noexcept {
    int n = unlocated;
    for (const auto& c : per_segment) n += c.total();
    return n;
}

ComparisonTable compare_cases(const std::vector<CaseSummary>& summaries) {
    if (summaries.empty()) throw Error(ErrorCode::EmptyInput, "no cases to compare");
    ComparisonTable table;
    for (const auto& s : summaries) {
        ComparisonRow row;
        row.procedure_id = s.procedure_id;
        for (const auto& a : s.anomalies) {
            if (a.segment) {
                count_into(row.per_segment[segment_column(*a.segment)], a.label);
            } else {
                ++row.unlocated;
            }
        }
        row.complete = s.phase_times.complete;
        row.insertion_s = s.phase_times.insertion_s;
        row.withdrawal_s = s.phase_times.withdrawal_s;
        row.phase_ratio = phase_ratio_violated(s.phase_times);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_csv(const ComparisonTable& table) {
    std::string out = "case,R,S,D,T,A,C,insertion_s,withdrawal_s,complete\n";
    for (const auto& row : table.rows) {
        out += csv_field(row.procedure_id);
        for (const auto& c : row.per_segment) {
            out += ",P" + std::to_string(c.polyp) + "/I" + std::to_string(c.ibd) + "/B" + std::to_string(c.blood_clot);
        }
        out += "," + time_cell(row.insertion_s) + "," + time_cell(row.withdrawal_s);
        out += row.complete ? ",true\n" : ",false\n";
    }
    return out;
}

std::vector<AnomalyMatch> align_anomalies(const CaseSummary& left, const CaseSummary& right, int threshold_cm,
                                          MatchStrategy strategy) {
    if (threshold_cm < 0 || threshold_cm % kDistanceStepCm != 0) {
        throw Error(ErrorCode::BadThreshold,
                    "threshold " + std::to_string(threshold_cm) + " cm is not a non-negative multiple of 5");
    }

    std::map<GroupKey, Group> groups;
    for (std::size_t i = 0; i < left.anomalies.size(); ++i) {
        groups[{left.anomalies[i].label, left.anomalies[i].segment}].left.push_back(i);
    }
    for (std::size_t j = 0; j < right.anomalies.size(); ++j) {
        groups[{right.anomalies[j].label, right.anomalies[j].segment}].right.push_back(j);
    }

    std::vector<AnomalyMatch> out;
    for (const auto& [key, group] : groups) {
        std::vector<Item> ldist;
        std::vector<Item> rdist;
        std::vector<std::size_t> lbare;
        std::vector<std::size_t> rbare;
        for (std::size_t i : group.left) {
            if (auto d = left.anomalies[i].distance_cm) {
                ldist.push_back({i, *d});
            } else {
                lbare.push_back(i);
            }
        }
        for (std::size_t j : group.right) {
            if (auto d = right.anomalies[j].distance_cm) {
                rdist.push_back({j, *d});
            } else {
                rbare.push_back(j);
            }
        }
        const auto by_distance = [](const Item& a, const Item& b) {
            return std::tie(a.distance, a.index) < std::tie(b.distance, b.index);
        };
        std::sort(ldist.begin(), ldist.end(), by_distance);
        std::sort(rdist.begin(), rdist.end(), by_distance);

        const auto pairs = strategy == MatchStrategy::Optimal ? optimal_pairs(ldist, rdist, threshold_cm)
                                                              : nearest_first_pairs(ldist, rdist, threshold_cm);

        std::vector<bool> lused(ldist.size());
        std::vector<bool> rused(rdist.size());
        std::vector<AnomalyMatch> matched;
        for (auto [i, j] : pairs) {
            lused[i] = rused[j] = true;
            matched.push_back({ldist[i].index, rdist[j].index, rdist[j].distance - ldist[i].distance,
                               MatchStatus::Matched});
        }
        std::sort(matched.begin(), matched.end(), [&](const AnomalyMatch& a, const AnomalyMatch& b) {
            const int la = *left.anomalies[*a.left].distance_cm;
            const int lb = *left.anomalies[*b.left].distance_cm;
            return std::tie(la, a.delta_distance_cm, a.left) < std::tie(lb, b.delta_distance_cm, b.left);
        });
        const std::size_t bare_pairs = std::min(lbare.size(), rbare.size());
        for (std::size_t k = 0; k < bare_pairs; ++k) {
            matched.push_back({lbare[k], rbare[k], 0, MatchStatus::Matched});
        }
        out.insert(out.end(), matched.begin(), matched.end());

        std::vector<std::size_t> only_left;
        std::vector<std::size_t> only_right;
        for (std::size_t i = 0; i < ldist.size(); ++i) {
            if (!lused[i]) only_left.push_back(ldist[i].index);
        }
        for (std::size_t k = bare_pairs; k < lbare.size(); ++k) only_left.push_back(lbare[k]);
        for (std::size_t j = 0; j < rdist.size(); ++j) {
            if (!rused[j]) only_right.push_back(rdist[j].index);
        }
        for (std::size_t k = bare_pairs; k < rbare.size(); ++k) only_right.push_back(rbare[k]);
        std::sort(only_left.begin(), only_left.end());
        std::sort(only_right.begin(), only_right.end());
        for (std::size_t i : only_left) out.push_back({i, std::nullopt, 0, MatchStatus::OnlyLeft});
        for (std::size_t j : only_right) out.push_back({std::nullopt, j, 0, MatchStatus::OnlyRight});
    }
    return out;
}

}  // namespace scopetrack
