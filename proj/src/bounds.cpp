#include "diamond/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace diamond {

double min_size_for_carats(const CaratVector& carats, const std::vector<std::size_t>& shape) {
    carats.validate();
    const std::size_t d = carats.size();
    if (d <= 1) throw DomainError("size bound requires d > 1");
    if (!shape.empty() && shape.size() != d)
        throw DomainError("shape length must match carat vector");

    double prod = 1.0;
    for (double k : carats.k) prod *= k;
    double bound = std::pow(prod, 1.0 / static_cast<double>(d - 1));
    for (std::size_t i = 0; i < shape.size(); ++i)
        bound = std::max(bound, carats[i] * static_cast<double>(shape[i]));
    return bound;
}

double max_cells_without_diamond(const std::vector<std::size_t>& shape, const CaratVector& carats) {
    carats.validate();
    if (shape.size() != carats.size()) throw DomainError("shape length must match carat vector");
    double total = 1.0;
    for (std::size_t i = 0; i < shape.size(); ++i)
        total += (carats[i] - 1.0) * (static_cast<double>(shape[i]) - 1.0);
    return total;
}

double max_sum_without_diamond(const std::vector<std::size_t>& shape, const CaratVector& carats) {
    carats.validate();
    if (shape.size() != carats.size()) throw DomainError("shape length must match carat vector");
    double total = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i)
        total += (static_cast<double>(shape[i]) + 1.0) * carats[i];
    return total + carats.max();
}

double hcld_average_threshold(const std::vector<std::size_t>& shape, const CaratVector& carats) {
    double volume = 1.0;
    for (std::size_t n : shape) volume *= static_cast<double>(n);
    if (volume <= 0.0) return 0.0;
    return max_sum_without_diamond(shape, carats) / volume;
}

static double shape_slack(const CubeStats& st) {
    double s = 0.0;
    for (std::size_t n : st.shape) s += static_cast<double>(n) - 1.0;
    return s;
}

std::int64_t kappa_lower_bound(const CubeStats& st) {
    if (st.cell_count == 0) return 0;
    if (st.cell_count == 1) return 1;
    const double slack = shape_slack(st);  // >= 1 whenever |C| >= 2
    // largest k with 1 + (k-1) * slack < |C|
    auto k = static_cast<std::int64_t>(
        1.0 + std::floor((static_cast<double>(st.cell_count) - 2.0) / slack));
    return std::max<std::int64_t>(k, 1);
}

double kappa_lower_bound_paper(const CubeStats& st) {
    if (st.cell_count == 0) return 0.0;
    const double slack = shape_slack(st);
    if (slack <= 0.0) return 1.0;
    return static_cast<double>(st.cell_count) / slack - 3.0;
}

std::int64_t kappa_lower_bound_sum(const CubeStats& st) {
    if (st.cell_count == 0) return 0;
    double denom = 1.0;  // sum_i (n_i + 1), plus 1 for the max term
    for (std::size_t n : st.shape) denom += static_cast<double>(n) + 1.0;
    return static_cast<std::int64_t>(std::floor(st.total_sum / denom));
}

double kappa_upper_bound(const CubeStats& st, Aggregator agg) {
    if (st.cell_count == 0) return 0.0;
    if (agg == Aggregator::Sum) return st.total_sum;
    std::vector<std::size_t> sorted = st.shape;
    std::sort(sorted.begin(), sorted.end());
    double prod = 1.0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) prod *= static_cast<double>(sorted[i]);
    return std::min(prod, static_cast<double>(st.cell_count));
}

double dcld_density_threshold(const std::vector<std::size_t>& shape, std::size_t p, double k) {
    if (p < 1) throw DomainError("p must be >= 1");
    double cells = 1.0, volume = 1.0;
    for (std::size_t n : shape) {
        double m = static_cast<double>(std::min(n, p));
        cells += (k - 1.0) * (m - 1.0);
        volume *= m;
    }
    return volume > 0.0 ? cells / volume : 0.0;
}

double zeta(double s) {
    if (s <= 1.0) throw DomainError("zeta(s) diverges for s <= 1");
    const int N = 64;
    double sum = 0.0;
    for (int j = 1; j <= N; ++j) sum += std::pow(j, -s);
    const double n = N;
    sum += std::pow(n, 1.0 - s) / (s - 1.0);
    sum -= 0.5 * std::pow(n, -s);
    sum += s * std::pow(n, -s - 1.0) / 12.0;
    sum -= s * (s + 1.0) * (s + 2.0) * std::pow(n, -s - 3.0) / 720.0;
    sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * std::pow(n, -s - 5.0) / 30240.0;
    return sum;
}

double expected_marked_fraction(const std::vector<std::size_t>& shape, const CaratVector& carats,
                                double s, int truncation) {
    carats.validate();
    if (shape.size() != carats.size()) throw DomainError("shape length must match carat vector");
    if (s <= 1.0) throw DomainError("zeta skew model requires s > 1");
    if (static_cast<double>(truncation) < carats.max())
        throw DomainError("truncation must be at least max k_i");

    const double z = zeta(s);
    double total = 0.0, marked = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        double partial = 0.0;
        for (int j = 1; j < carats[i]; ++j) partial += std::pow(j, -s);
        total += static_cast<double>(shape[i]);
        marked += static_cast<double>(shape[i]) * partial / z;
    }
    return total > 0.0 ? marked / total : 0.0;
}

PrefilterResult perfect_prefilter(const Cube& cube, const std::vector<std::size_t>& target_shape,
                                  const DiceOptions& opts) {
    const std::size_t d = cube.dim_count();
    if (target_shape.size() != d) throw DomainError("target shape must match dimension count");
    for (std::size_t m : target_shape)
        if (m < 1) throw DomainError("target shape entries must be >= 1");

    CaratVector k = CaratVector::uniform(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double prod = 1.0;
        for (std::size_t j = 0; j < d; ++j)
            if (j != i) prod *= static_cast<double>(target_shape[j]);
        k.k[i] = prod;
    }

    PrefilterResult r;
    r.carats_used = k;
    DiamondResult dr = dice(cube, k, Aggregator::Count, opts);
    r.region = std::move(dr.diamond);
    r.feasible = r.region.cell_count() > 0;
    for (std::size_t i = 0; i < d && r.feasible; ++i)
        r.feasible = r.region.dims[i].size() >= target_shape[i];
    return r;
}

}  // namespace diamond
