#include "partskel/gaitlab.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

EvalReport evaluate(std::span<const Embedding> gallery, std::span<const Embedding> probe, SelfMatch self_match,
                    int max_rank) {
    if (gallery.empty()) throw EvaluationError("gallery is empty");
    if (probe.empty()) throw EvaluationError("probe set is empty");
    if (max_rank < 5) max_rank = 5;
    const std::size_t dim = gallery.front().values.size();
    for (const auto& e : gallery) {
        if (e.values.size() != dim) throw EvaluationError("gallery embeddings differ in dimension");
    }

    EvalReport report;
    report.probes = probe.size();
    report.gallery = gallery.size();
    report.cmc.assign(static_cast<std::size_t>(max_rank), 0.0);

    std::vector<std::size_t> order;
    std::vector<double> dist;
    for (const auto& q : probe) {
        if (q.values.size() != dim) throw EvaluationError("probe embedding dimension differs from gallery");
        order.clear();
        dist.assign(gallery.size(), 0.0);
        for (std::size_t g = 0; g < gallery.size(); ++g) {
            if (self_match == SelfMatch::ExcludeSameSample && !q.sample_id.empty() &&
                gallery[g].sample_id == q.sample_id) {
                continue;
            }
            double d = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double t = q.values[k] - gallery[g].values[k];
                d += t * t;
            }
            dist[g] = d;
            order.push_back(g);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

        // 1-based ranks of the matching gallery entries
        std::size_t positives = 0;
        std::size_t first_hit = 0;
        std::size_t last_hit = 0;
        double precision_sum = 0.0;
        for (std::size_t r = 0; r < order.size(); ++r) {
            if (gallery[order[r]].identity != q.identity) continue;
            ++positives;
            if (positives == 1) first_hit = r + 1;
            last_hit = r + 1;
            precision_sum += static_cast<double>(positives) / static_cast<double>(r + 1);
        }
        if (positives == 0) {
            throw EvaluationError("probe identity '" + q.identity + "' is absent from the gallery");
        }
        for (std::size_t k = first_hit; k <= report.cmc.size(); ++k) report.cmc[k - 1] += 1.0;
        report.mean_ap += precision_sum / static_cast<double>(positives);
        report.mean_inp += static_cast<double>(positives) / static_cast<double>(last_hit);
    }

    const double n = static_cast<double>(probe.size());
    for (auto& v : report.cmc) v /= n;
    report.mean_ap /= n;
    report.mean_inp /= n;
    report.rank1 = report.cmc[0];
    report.rank5 = report.cmc[4];
    return report;
}

}  // namespace partskel
