#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlsg {

/// One letter of a free-group word: a generator index with a sign.
struct GroupLetter {
    std::uint32_t gen = 0;
    bool inverse = false;

    friend bool operator==(const GroupLetter& a, const GroupLetter& b) {
        return a.gen == b.gen && a.inverse == b.inverse;
    }
    friend bool operator!=(const GroupLetter& a, const GroupLetter& b) { return !(a == b); }
    friend bool operator<(const GroupLetter& a, const GroupLetter& b) {
        if (a.gen != b.gen) return a.gen < b.gen;
        return a.inverse < b.inverse;
    }
    GroupLetter inverted() const { return {gen, !inverse}; }
};

/// Word over the free generators of a marking.  No reduction invariant is
/// imposed; reduction is an operation.
using GroupWord = std::vector<GroupLetter>;

inline GroupWord free_reduce(const GroupWord& w) {
    GroupWord out;
    for (const GroupLetter& l : w) {
        if (!out.empty() && out.back() == l.inverted())
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

inline GroupWord invert(const GroupWord& w) {
    GroupWord out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverted());
    return out;
}

inline GroupWord concat_words(const GroupWord& a, const GroupWord& b) {
    GroupWord out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline GroupWord conjugate_word(const GroupWord& w, const GroupWord& by) {
    return free_reduce(concat_words(concat_words(by, w), invert(by)));
}

inline GroupWord power(const GroupWord& w, int n) {
    GroupWord base = n < 0 ? invert(w) : w;
    GroupWord out;
    for (int i = 0; i < (n < 0 ? -n : n); ++i) out = concat_words(out, base);
    return free_reduce(out);
}

/// Cyclically reduced form of the conjugacy class of w.
inline GroupWord cyclic_reduce_word(const GroupWord& w) {
    GroupWord r = free_reduce(w);
    std::size_t lo = 0, hi = r.size();
    while (hi - lo >= 2 && r[lo] == r[hi - 1].inverted()) {
        ++lo;
        --hi;
    }
    return GroupWord(r.begin() + static_cast<std::ptrdiff_t>(lo),
                     r.begin() + static_cast<std::ptrdiff_t>(hi));
}

inline bool is_cyclically_reduced_word(const GroupWord& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] == w[i - 1].inverted()) return false;
    if (w.size() >= 2 && w.front() == w.back().inverted()) return false;
    return true;
}

/// Canonical conjugacy-class key: the lexicographically least rotation of
/// the cyclically reduced word.
inline GroupWord canonical_class_key(const GroupWord& w) {
    GroupWord c = cyclic_reduce_word(w);
    const std::size_t n = c.size();
    if (n <= 1) return c;
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const GroupLetter& x = c[(k + i) % n];
            const GroupLetter& y = c[(best + i) % n];
            if (x < y) {
                best = k;
                break;
            }
            if (y < x) break;
        }
    }
    GroupWord out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(c[(best + i) % n]);
    return out;
}

/// Generator images defining a homomorphism of free groups.
struct GroupWordSubstitution {
    std::vector<GroupWord> images;  // images[i] = target word for generator i

    GroupWord apply(const GroupWord& w) const {
        GroupWord out;
        for (const GroupLetter& l : w) {
            const GroupWord& img = images.at(l.gen);
            if (l.inverse) {
                GroupWord inv = invert(img);
                out.insert(out.end(), inv.begin(), inv.end());
            } else {
                out.insert(out.end(), img.begin(), img.end());
            }
        }
        return free_reduce(out);
    }

    static GroupWordSubstitution identity(std::size_t rank) {
        GroupWordSubstitution s;
        s.images.resize(rank);
        for (std::uint32_t i = 0; i < rank; ++i) s.images[i] = {GroupLetter{i, false}};
        return s;
    }
};

/// Word syntax used by the CLI and file formats: whitespace-separated
/// tokens g1, g2', ... (1-based generator index, apostrophe = inverse).
inline std::string word_to_string(const GroupWord& w) {
    std::string s;
    for (const GroupLetter& l : w) {
        if (!s.empty()) s += ' ';
        s += 'g';
        s += std::to_string(l.gen + 1);
        if (l.inverse) s += '\'';
    }
    return s;
}

struct WordParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline GroupWord parse_word(std::string_view text, std::size_t rank) {
    GroupWord w;
    std::size_t i = 0;
    int tokenIndex = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n')) ++i;
        if (i >= text.size()) break;
        ++tokenIndex;
        auto bad = [&]() -> GroupWord {
            throw WordParseError("bad word token #" + std::to_string(tokenIndex) +
                                 " (expected gK or gK')");
        };
        if (text[i] != 'g') return bad();
        ++i;
        std::uint64_t idx = 0;
        std::size_t digits = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            idx = idx * 10 + static_cast<std::uint64_t>(text[i] - '0');
            ++i;
            ++digits;
            if (idx > 1000000) return bad();
        }
        if (digits == 0 || idx == 0) return bad();
        bool inv = false;
        if (i < text.size() && text[i] == '\'') {
            inv = true;
            ++i;
        }
        if (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\n') return bad();
        if (idx > rank)
            throw WordParseError("generator g" + std::to_string(idx) + " exceeds rank " +
                                 std::to_string(rank));
        w.push_back({static_cast<std::uint32_t>(idx - 1), inv});
    }
    return w;
}

}  // namespace mlsg
