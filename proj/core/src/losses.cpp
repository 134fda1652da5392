#include "partskel/gaitlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

namespace {

void check_label(std::size_t classes, int label) {
    if (classes == 0) throw LossError("empty prediction vector");
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
        throw LossError("label " + std::to_string(label) + " out of range for " + std::to_string(classes) +
                        " classes");
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) throw LossError("empty logit vector");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

double cross_entropy(std::span<const double> predicted, int label) {
    check_label(predicted.size(), label);
    double sum = 0.0;
    for (double p : predicted) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw LossError("predicted probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw LossError("predicted probabilities must sum to 1 (got " + std::to_string(sum) + ")");
    return std::max(0.0, -std::log(predicted[static_cast<std::size_t>(label)]));
}

double cross_entropy_logits(std::span<const double> logits, int label) {
    check_label(logits.size(), label);
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - mx);
    return std::max(0.0, mx + std::log(sum) - logits[static_cast<std::size_t>(label)]);
}

std::vector<double> cross_entropy_gradient(std::span<const double> logits, int label) {
    check_label(logits.size(), label);
    auto g = softmax(logits);
    g[static_cast<std::size_t>(label)] -= 1.0;
    return g;
}

void TripletBatch::validate() const {
    if (!(margin > 0.0)) throw LossError("triplet margin must be > 0");
    for (const auto& t : triplets) {
        const auto d = t.anchor.values.size();
        if (d == 0 || t.positive.values.size() != d || t.negative.values.size() != d) {
            throw LossError("triplet embeddings must share a non-zero dimension");
        }
        for (const auto* e : {&t.anchor, &t.positive, &t.negative}) {
            if (!std::all_of(e->values.begin(), e->values.end(), [](double v) { return std::isfinite(v); })) {
                throw LossError("triplet embeddings must be finite");
            }
        }
        if (!t.anchor.identity.empty()) {
            if (t.positive.identity != t.anchor.identity) throw LossError("positive must share the anchor identity");
            if (t.negative.identity == t.anchor.identity) throw LossError("negative must differ from the anchor identity");
        }
    }
}

double triplet_loss(const TripletBatch& batch) {
    batch.validate();
    double loss = 0.0;
    for (const auto& t : batch.triplets) {
        const double ap = squared_distance(t.anchor.values, t.positive.values);
        const double an = squared_distance(t.anchor.values, t.negative.values);
        loss += std::max(0.0, ap - an + batch.margin);
    }
    return loss;
}

TripletGradient triplet_gradient(const TripletBatch& batch, double kink_tolerance) {
    batch.validate();
    TripletGradient g;
    for (std::size_t i = 0; i < batch.triplets.size(); ++i) {
        const auto& t = batch.triplets[i];
        const auto& a = t.anchor.values;
        const auto& p = t.positive.values;
        const auto& n = t.negative.values;
        const double arg = squared_distance(a, p) - squared_distance(a, n) + batch.margin;
        if (std::abs(arg) <= kink_tolerance) {
            throw NonDifferentiableError("triplet " + std::to_string(i) + " sits on the hinge kink");
        }
        std::vector<double> ga(a.size(), 0.0);
        std::vector<double> gp(a.size(), 0.0);
        std::vector<double> gn(a.size(), 0.0);
        if (arg > 0.0) {
            for (std::size_t k = 0; k < a.size(); ++k) {
                ga[k] = 2.0 * (n[k] - p[k]);
                gp[k] = 2.0 * (p[k] - a[k]);
                gn[k] = 2.0 * (a[k] - n[k]);
            }
        }
        g.anchor.push_back(std::move(ga));
        g.positive.push_back(std::move(gp));
        g.negative.push_back(std::move(gn));
    }
    return g;
}

}  // namespace partskel
