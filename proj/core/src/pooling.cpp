#include "partskel/gaitlab.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

PooledTensor temporal_pool(const FeatureTensor& f) {
    const auto& d = f.dims();
    PooledTensor z({d.n, d.c, d.h, d.w});
    for (int n = 0; n < d.n; ++n) {
        for (int c = 0; c < d.c; ++c) {
            for (int h = 0; h < d.h; ++h) {
                for (int w = 0; w < d.w; ++w) {
                    double m = f.at(n, c, 0, h, w);
                    for (int s = 1; s < d.s; ++s) m = std::max(m, f.at(n, c, s, h, w));
                    z.at(n, c, h, w) = m;
                }
            }
        }
    }
    return z;
}

std::vector<StripeFeature> horizontal_pool(const PooledTensor& z, int stripes) {
    const auto& d = z.dims();
    if (stripes < 1 || d.h % stripes != 0) {
        throw PoolingError("stripes (" + std::to_string(stripes) + ") must divide the height (" +
                           std::to_string(d.h) + ")");
    }
    const int rows = d.h / stripes;
    const double cells = static_cast<double>(rows) * d.w;

    std::vector<StripeFeature> out;
    out.reserve(static_cast<std::size_t>(d.n));
    for (int n = 0; n < d.n; ++n) {
        StripeFeature sf{stripes, d.c, std::vector<double>(static_cast<std::size_t>(stripes) * d.c)};
        for (int s = 0; s < stripes; ++s) {
            for (int c = 0; c < d.c; ++c) {
                double mx = -std::numeric_limits<double>::infinity();
                double sum = 0.0;
                for (int h = s * rows; h < (s + 1) * rows; ++h) {
                    for (int w = 0; w < d.w; ++w) {
                        const double v = z.at(n, c, h, w);
                        mx = std::max(mx, v);
                        sum += v;
                    }
                }
                sf.values[static_cast<std::size_t>(s) * d.c + static_cast<std::size_t>(c)] = mx + sum / cells;
            }
        }
        out.push_back(std::move(sf));
    }
    return out;
}

std::vector<double> flatten(const StripeFeature& f) { return f.values; }

}  // namespace partskel
