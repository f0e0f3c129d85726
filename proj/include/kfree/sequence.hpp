// sequence.hpp
// CoefficientSequence: exact integer values a(1..N) of an arithmetic function,
// stored densely (one int64 per n) or sparsely (ascending (n, value) pairs).
// Absent sparse entries are zero.

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace kfree {

struct Term {
    std::uint64_t n;
    std::int64_t value;
    friend bool operator==(const Term&, const Term&) = default;
};

class CoefficientSequence {
public:
    CoefficientSequence() = default;

    // `values[0]` is ignored; values.size() - 1 becomes the limit.
    static CoefficientSequence dense(std::string name, std::vector<std::int64_t> values) {
        if (values.empty()) values.push_back(0);
        CoefficientSequence s;
        s.name_ = std::move(name);
        s.limit_ = values.size() - 1;
        s.dense_ = std::move(values);
        s.dense_[0] = 0;
        s.sparse_ = false;
        return s;
    }

    // Terms may arrive unsorted or with repeated n; they are sorted, merged
    // and zero entries dropped. Terms with n outside [1, limit] are rejected.
    static CoefficientSequence sparse(std::string name, std::uint64_t limit, std::vector<Term> terms) {
        for (const Term& t : terms) {
            if (t.n == 0 || t.n > limit)
                throw DomainError("sparse term index " + std::to_string(t.n) +
                                  " outside [1, " + std::to_string(limit) + "]");
        }
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.n < b.n; });
        std::vector<Term> merged;
        merged.reserve(terms.size());
        for (const Term& t : terms) {
            if (!merged.empty() && merged.back().n == t.n)
                merged.back().value += t.value;
            else
                merged.push_back(t);
        }
        std::erase_if(merged, [](const Term& t) { return t.value == 0; });

        CoefficientSequence s;
        s.name_ = std::move(name);
        s.limit_ = limit;
        s.terms_ = std::move(merged);
        s.sparse_ = true;
        return s;
    }

    const std::string& name() const noexcept { return name_; }
    std::uint64_t limit() const noexcept { return limit_; }
    bool is_sparse() const noexcept { return sparse_; }

    std::int64_t operator()(std::uint64_t n) const {
        if (n == 0 || n > limit_)
            throw CapacityError("index " + std::to_string(n) + " outside sequence '" + name_ +
                                "' of limit " + std::to_string(limit_));
        if (!sparse_) return dense_[n];
        auto it = std::lower_bound(terms_.begin(), terms_.end(), n,
                                   [](const Term& t, std::uint64_t key) { return t.n < key; });
        return (it != terms_.end() && it->n == n) ? it->value : 0;
    }

    // Dense storage including the unused slot 0. Empty for sparse sequences.
    std::span<const std::int64_t> dense_values() const noexcept { return dense_; }
    // Sparse storage. Empty for dense sequences.
    std::span<const Term> terms() const noexcept { return terms_; }

    // Calls fn(n, value) for every nonzero value in ascending n.
    template <class Fn>
    void for_each_nonzero(Fn&& fn) const {
        if (sparse_) {
            for (const Term& t : terms_) fn(t.n, t.value);
        } else {
            for (std::uint64_t n = 1; n <= limit_; ++n)
                if (dense_[n] != 0) fn(n, dense_[n]);
        }
    }

    std::size_t support_size() const {
        if (sparse_) return terms_.size();
        return static_cast<std::size_t>(
            std::count_if(dense_.begin() + 1, dense_.end(), [](std::int64_t v) { return v != 0; }));
    }

    CoefficientSequence to_dense() const {
        if (!sparse_) return *this;
        std::vector<std::int64_t> v(limit_ + 1, 0);
        for (const Term& t : terms_) v[t.n] = t.value;
        return dense(name_, std::move(v));
    }

    CoefficientSequence to_sparse() const {
        if (sparse_) return *this;
        std::vector<Term> t;
        for_each_nonzero([&](std::uint64_t n, std::int64_t v) { t.push_back({n, v}); });
        return sparse(name_, limit_, std::move(t));
    }

    // Same values restricted to 1..new_limit (new_limit <= limit).
    CoefficientSequence truncated(std::uint64_t new_limit) const {
        if (new_limit > limit_)
            throw CapacityError("cannot extend '" + name_ + "' beyond its limit " + std::to_string(limit_));
        if (!sparse_)
            return dense(name_, std::vector<std::int64_t>(dense_.begin(), dense_.begin() + new_limit + 1));
        std::vector<Term> t;
        for (const Term& term : terms_) {
            if (term.n > new_limit) break;
            t.push_back(term);
        }
        return sparse(name_, new_limit, std::move(t));
    }

    CoefficientSequence renamed(std::string name) const {
        CoefficientSequence s = *this;
        s.name_ = std::move(name);
        return s;
    }

    // Value equality over 1..limit, independent of storage and name.
    bool same_values(const CoefficientSequence& other) const {
        if (limit_ != other.limit_) return false;
        std::vector<Term> a, b;
        for_each_nonzero([&](std::uint64_t n, std::int64_t v) { a.push_back({n, v}); });
        other.for_each_nonzero([&](std::uint64_t n, std::int64_t v) { b.push_back({n, v}); });
        return a == b;
    }

private:
    std::string name_;
    std::uint64_t limit_ = 0;
    bool sparse_ = false;
    std::vector<std::int64_t> dense_{0};
    std::vector<Term> terms_;
};

}  // namespace kfree
