#include <algorithm>
#include <limits>
#include <sstream>

#include "scfconv/analysis.hpp"

namespace scfconv {

double GapStructure::delta(Index j) const {
    if (j < 1 || j > count() + 1) {
        std::ostringstream os;
        os << "GapStructure::delta: index " << j << " outside [1, " << count() + 1 << "]";
        throw std::out_of_range(os.str());
    }
    if (j == count() + 1) return std::numeric_limits<double>::infinity();
    return pairs[static_cast<std::size_t>(j - 1)].gap;
}

std::vector<double> GapStructure::deltas() const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& pr : pairs) out.push_back(pr.gap);
    return out;
}

std::vector<std::pair<Index, Index>> GapStructure::omega(Index q) const {
    if (q < 0 || q > count()) {
        std::ostringstream os;
        os << "GapStructure::omega: q = " << q << " outside [0, " << count() << "]";
        throw std::out_of_range(os.str());
    }
    std::vector<std::pair<Index, Index>> out;
    out.reserve(static_cast<std::size_t>(2 * q));
    for (Index k = 0; k < q; ++k) {
        const auto& pr = pairs[static_cast<std::size_t>(k)];
        out.emplace_back(pr.virt, pr.occ);
        out.emplace_back(pr.occ, pr.virt);
    }
    return out;
}

GapStructure gap_structure(const VecR& lambdas, Index p) {
    const Index n = lambdas.size();
    require_gap(lambdas, p, "gap_structure");
    GapStructure g;
    g.n = n;
    g.p = p;
    g.pairs.reserve(static_cast<std::size_t>(p * (n - p)));
    for (Index i = 0; i < p; ++i)
        for (Index j = p; j < n; ++j) g.pairs.push_back({i, j, lambdas(j) - lambdas(i)});
    std::sort(g.pairs.begin(), g.pairs.end(), [](const CrossPair& a, const CrossPair& b) {
        if (a.gap != b.gap) return a.gap < b.gap;
        if (a.occ != b.occ) return a.occ < b.occ;
        return a.virt < b.virt;
    });
    return g;
}

}  // namespace scfconv
