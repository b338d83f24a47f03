#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "mlsg/core.hpp"
#include "mlsg/marking.hpp"
#include "mlsg/word.hpp"

namespace mlsg {

/// Thrown by oracles that cannot answer a query (replay file misses the
/// class, for instance).
struct OracleDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Blind access to the length function of a hidden space: deterministic,
/// conjugation-invariant, zero exactly on the identity.  Reconstruction
/// code sees nothing but query().
class SpectrumOracle {
public:
    virtual ~SpectrumOracle() = default;
    virtual Rational query(const GroupWord& w) const = 0;
};

/// Oracle computing w -> mls(phi(w)) on a hidden core.  Whether phi is a
/// genuine isomorphism is the caller's responsibility; only lengths leak
/// through the interface.
class GraphBackedOracle final : public SpectrumOracle {
public:
    GraphBackedOracle(CoreGraph hidden, Marking marking, GroupWordSubstitution phi)
        : hidden_(std::move(hidden)), marking_(std::move(marking)), phi_(std::move(phi)) {}

    Rational query(const GroupWord& w) const override {
        return mls(hidden_.graph(), marking_, phi_.apply(w));
    }

private:
    CoreGraph hidden_;
    Marking marking_;
    GroupWordSubstitution phi_;
};

inline std::unique_ptr<SpectrumOracle> make_oracle(CoreGraph hidden, Marking marking,
                                                   GroupWordSubstitution phi) {
    // The caller's rank may differ from the hidden one; images just have to
    // stay inside the hidden marking's generators.
    for (const GroupWord& img : phi.images)
        for (const GroupLetter& l : img)
            if (l.gen >= marking.rank())
                throw std::out_of_range("substitution image exceeds hidden rank");
    return std::make_unique<GraphBackedOracle>(std::move(hidden), std::move(marking),
                                               std::move(phi));
}

/// Oracle answering from a finite table of canonical conjugacy classes,
/// as produced by a spectrum dump.
class DumpBackedOracle final : public SpectrumOracle {
public:
    explicit DumpBackedOracle(std::map<std::string, Rational> table)
        : table_(std::move(table)) {}

    Rational query(const GroupWord& w) const override {
        GroupWord key = canonical_class_key(w);
        if (key.empty()) return Rational(0);
        auto it = table_.find(word_to_string(key));
        if (it == table_.end())
            throw OracleDomainError("spectrum dump does not cover class '" +
                                    word_to_string(key) + "'");
        return it->second;
    }

private:
    std::map<std::string, Rational> table_;
};

}  // namespace mlsg
