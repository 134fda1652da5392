#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "partskel/error.hpp"
#include "partskel/gaitlab.hpp"

namespace partskel {

LinearMap LinearMap::identity(int n) {
    LinearMap m = zeros(n, n);
    for (int i = 0; i < n; ++i) m.weights[static_cast<std::size_t>(i) * n + i] = 1.0;
    return m;
}

LinearMap LinearMap::zeros(int rows, int cols) {
    if (rows < 1 || cols < 1) throw EmbedError("linear map dims must be >= 1");
    return {rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0)};
}

std::vector<double> LinearMap::apply(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(cols)) {
        throw EmbedError("linear map expects " + std::to_string(cols) + " inputs, got " + std::to_string(x.size()));
    }
    if (weights.size() != static_cast<std::size_t>(rows) * cols) throw EmbedError("linear map weight count mismatch");
    std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
        const double* row = weights.data() + static_cast<std::size_t>(r) * cols;
        double acc = 0.0;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
}

Standardization Standardization::identity(int d) {
    const auto n = static_cast<std::size_t>(d);
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), std::vector<double>(n, 1.0),
            std::vector<double>(n, 0.0)};
}

Standardization Standardization::fit(std::span<const std::vector<double>> samples, double min_variance) {
    if (samples.empty()) throw EmbedError("cannot fit statistics on an empty sample set");
    const std::size_t d = samples.front().size();
    auto s = identity(static_cast<int>(d));
    for (const auto& x : samples) {
        if (x.size() != d) throw EmbedError("samples differ in dimension");
        for (std::size_t k = 0; k < d; ++k) s.mean[k] += x[k];
    }
    const double n = static_cast<double>(samples.size());
    for (auto& m : s.mean) m /= n;
    std::vector<double> var(d, 0.0);
    for (const auto& x : samples) {
        for (std::size_t k = 0; k < d; ++k) {
            const double t = x[k] - s.mean[k];
            var[k] += t * t;
        }
    }
    for (std::size_t k = 0; k < d; ++k) {
        const double v = var[k] / n;
        s.variance[k] = v < min_variance ? 1.0 : v;
    }
    return s;
}

void Standardization::validate() const {
    const auto d = mean.size();
    if (variance.size() != d || gamma.size() != d || beta.size() != d) {
        throw EmbedError("standardization vectors differ in length");
    }
    for (double v : variance) {
        if (!(v > 0.0)) throw EmbedError("standardization variance must be positive");
    }
}

std::vector<double> Standardization::apply(std::span<const double> y) const {
    validate();
    if (y.size() != mean.size()) {
        throw EmbedError("standardization expects " + std::to_string(mean.size()) + " dims, got " +
                         std::to_string(y.size()));
    }
    std::vector<double> out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        out[k] = (y[k] - mean[k]) / std::sqrt(variance[k]) * gamma[k] + beta[k];
    }
    return out;
}

Embedding embed(const StripeFeature& f, const LinearMap& weights, const Standardization& norm, std::string identity,
                std::string sample_id) {
    const auto flat = flatten(f);
    if (static_cast<std::size_t>(weights.cols) != flat.size()) {
        throw EmbedError("weights expect " + std::to_string(weights.cols) + " inputs but the stripe feature has " +
                         std::to_string(flat.size()));
    }
    return {norm.apply(weights.apply(flat)), std::move(identity), std::move(sample_id)};
}

Embedding EmbeddingHead::apply(std::span<const double> features, std::string identity, std::string sample_id) const {
    return {norm.apply(linear.apply(features)), std::move(identity), std::move(sample_id)};
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

}  // namespace

EmbeddingHead fit_embedding_head(std::span<const std::vector<double>> features,
                                 std::span<const std::string> identities, const HeadOptions& options) {
    if (features.empty()) throw EmbedError("cannot fit an embedding head without samples");
    if (features.size() != identities.size()) throw EmbedError("one identity per sample is required");
    if (options.epochs < 0 || !(options.learning_rate > 0.0) || !(options.margin > 0.0)) {
        throw EmbedError("invalid head training options");
    }
    const std::size_t n = features.size();
    const std::size_t dim = features.front().size();
    if (dim == 0) throw EmbedError("empty descriptors");

    // Unit-variance inputs; the mean is absorbed by the output standardization.
    const auto input_stats = Standardization::fit(features);
    std::vector<std::vector<double>> x(n, std::vector<double>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        if (features[i].size() != dim) throw EmbedError("descriptors differ in dimension");
        for (std::size_t k = 0; k < dim; ++k) {
            x[i][k] = (features[i][k] - input_stats.mean[k]) / std::sqrt(input_stats.variance[k]);
        }
    }

    LinearMap w = LinearMap::identity(static_cast<int>(dim));
    if (options.epochs > 0) {
        std::map<std::string, int> label_of;
        for (const auto& id : identities) label_of.emplace(id, 0);
        int next = 0;
        for (auto& [id, label] : label_of) label = next++;
        const auto classes = static_cast<std::size_t>(next);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = label_of.at(identities[i]);

        std::mt19937_64 rng(options.seed);
        std::vector<double> classifier(classes * dim);
        for (auto& v : classifier) v = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 0.02;

        std::vector<std::vector<double>> e(n);
        std::vector<std::vector<double>> grad_e(n, std::vector<double>(dim));
        std::vector<double> grad_w(dim * dim);
        std::vector<double> grad_v(classes * dim);
        for (int epoch = 0; epoch < options.epochs; ++epoch) {
            for (std::size_t i = 0; i < n; ++i) e[i] = w.apply(x[i]);
            for (auto& g : grad_e) std::fill(g.begin(), g.end(), 0.0);
            std::fill(grad_v.begin(), grad_v.end(), 0.0);

            // batch-hard triplets
            if (options.triplet_weight > 0.0) {
                TripletBatch batch{{}, options.margin};
                std::vector<std::array<std::size_t, 3>> index;
                for (std::size_t a = 0; a < n; ++a) {
                    std::size_t p = n;
                    std::size_t q = n;
                    double dp = -1.0;
                    double dn = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == a) continue;
                        const double d = squared_distance(e[a], e[j]);
                        if (labels[j] == labels[a]) {
                            if (d > dp) {
                                dp = d;
                                p = j;
                            }
                        } else if (q == n || d < dn) {
                            dn = d;
                            q = j;
                        }
                    }
                    if (p == n || q == n) continue;
                    const double arg = dp - dn + options.margin;
                    if (std::abs(arg) <= 1e-6) continue;
                    batch.triplets.push_back({{e[a], {}, {}}, {e[p], {}, {}}, {e[q], {}, {}}});
                    index.push_back({a, p, q});
                }
                if (!batch.triplets.empty()) {
                    const auto g = triplet_gradient(batch);
                    const double scale = options.triplet_weight / static_cast<double>(batch.triplets.size());
                    for (std::size_t t = 0; t < index.size(); ++t) {
                        for (std::size_t k = 0; k < dim; ++k) {
                            grad_e[index[t][0]][k] += scale * g.anchor[t][k];
                            grad_e[index[t][1]][k] += scale * g.positive[t][k];
                            grad_e[index[t][2]][k] += scale * g.negative[t][k];
                        }
                    }
                }
            }

            if (options.ce_weight > 0.0) {
                const double scale = options.ce_weight / static_cast<double>(n);
                std::vector<double> logits(classes);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t c = 0; c < classes; ++c) {
                        double acc = 0.0;
                        for (std::size_t k = 0; k < dim; ++k) acc += classifier[c * dim + k] * e[i][k];
                        logits[c] = acc;
                    }
                    const auto g = cross_entropy_gradient(logits, labels[i]);
                    for (std::size_t c = 0; c < classes; ++c) {
                        for (std::size_t k = 0; k < dim; ++k) {
                            grad_v[c * dim + k] += scale * g[c] * e[i][k];
                            grad_e[i][k] += scale * g[c] * classifier[c * dim + k];
                        }
                    }
                }
            }

            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t r = 0; r < dim; ++r) {
                    const double g = grad_e[i][r];
                    if (g == 0.0) continue;
                    double* row = grad_w.data() + r * dim;
                    for (std::size_t c = 0; c < dim; ++c) row[c] += g * x[i][c];
                }
            }
            for (std::size_t k = 0; k < grad_w.size(); ++k) w.weights[k] -= options.learning_rate * grad_w[k];
            for (std::size_t k = 0; k < grad_v.size(); ++k) classifier[k] -= options.learning_rate * grad_v[k];
        }
    }

    // Fold the input scaling into the linear map.
    EmbeddingHead head{w, {}};
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) head.linear.weights[r * dim + c] /= std::sqrt(input_stats.variance[c]);
    }
    std::vector<std::vector<double>> projected;
    projected.reserve(n);
    for (const auto& f : features) projected.push_back(head.linear.apply(f));
    head.norm = Standardization::fit(projected);
    return head;
}

}  // namespace partskel
