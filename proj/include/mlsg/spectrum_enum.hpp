#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mlsg/marking.hpp"
#include "mlsg/word.hpp"

namespace mlsg {

/// All canonical conjugacy-class representatives of word length <= bound
/// (cyclically reduced words that are their own least rotation), in
/// deterministic lexicographic-by-length order.  The empty class is not
/// listed.
inline std::vector<GroupWord> enumerate_classes(std::size_t rank, std::size_t bound) {
    std::vector<GroupWord> out;
    std::set<GroupWord> seen;
    GroupWord word;
    auto dfs = [&](auto&& self) -> void {
        if (!word.empty() && is_cyclically_reduced_word(word)) {
            GroupWord key = canonical_class_key(word);
            if (key == word && seen.insert(key).second) out.push_back(key);
        }
        if (word.size() >= bound) return;
        for (std::uint32_t gen = 0; gen < rank; ++gen) {
            for (bool inv : {false, true}) {
                GroupLetter l{gen, inv};
                if (!word.empty() && word.back() == l.inverted()) continue;
                word.push_back(l);
                self(self);
                word.pop_back();
            }
        }
    };
    dfs(dfs);
    std::stable_sort(out.begin(), out.end(), [](const GroupWord& a, const GroupWord& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

/// Spectrum dump source: canonical class -> geodesic length.
inline std::vector<std::pair<GroupWord, Rational>> spectrum_table(const MetricGraph& g,
                                                                  const Marking& m,
                                                                  std::size_t bound) {
    std::vector<std::pair<GroupWord, Rational>> out;
    for (const GroupWord& w : enumerate_classes(m.rank(), bound))
        out.push_back({w, mls(g, m, w)});
    return out;
}

/// Searches for a conjugacy class whose lengths differ between two marked
/// graphs under the identity correspondence of generators.  Returning
/// nothing means only that no witness exists up to the bound; it is not a
/// proof of isometry.
struct SpectrumWitness {
    GroupWord word;
    Rational length1;
    Rational length2;
};

inline std::optional<SpectrumWitness> find_spectrum_witness(const MetricGraph& g1,
                                                            const Marking& m1,
                                                            const MetricGraph& g2,
                                                            const Marking& m2,
                                                            std::size_t bound) {
    if (m1.rank() != m2.rank())
        throw std::invalid_argument("witness search requires equal ranks");
    for (const GroupWord& w : enumerate_classes(m1.rank(), bound)) {
        Rational l1 = mls(g1, m1, w);
        Rational l2 = mls(g2, m2, w);
        if (l1 != l2) return SpectrumWitness{w, l1, l2};
    }
    return std::nullopt;
}

}  // namespace mlsg
