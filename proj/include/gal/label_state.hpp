#pragma once
// Which labels have been revealed, and which nodes a strategy may still query.

#include <string>
#include <vector>

#include "gal/error.hpp"
#include "gal/graph.hpp"

namespace gal {

// Partition of the nodes into observed O (label revealed from the graph) and
// unobserved U. Queryable tracks acquisition eligibility separately so that
// held-out test nodes stay unobserved yet can never be picked.
class LabelState {
public:
    explicit LabelState(const Graph& g)
        : graph_(&g),
          observed_(static_cast<std::size_t>(g.n()), 0),
          queryable_(static_cast<std::size_t>(g.n()), 1) {}

    const Graph& graph() const { return *graph_; }
    int n() const { return graph_->n(); }

    bool is_observed(int i) const { return observed_[static_cast<std::size_t>(i)] != 0; }
    bool is_queryable(int i) const {
        return queryable_[static_cast<std::size_t>(i)] != 0 && !is_observed(i);
    }

    // Reveals the ground-truth label of i. Throws if already observed.
    void observe(int i) {
        check_index(i);
        if (is_observed(i))
            throw ValidationError("node " + std::to_string(i) + " is already observed");
        observed_[static_cast<std::size_t>(i)] = 1;
        ++num_observed_;
    }

    void set_queryable(int i, bool q) {
        check_index(i);
        queryable_[static_cast<std::size_t>(i)] = q ? 1 : 0;
    }

    int num_observed() const { return num_observed_; }
    int num_unobserved() const { return n() - num_observed_; }

    std::vector<int> observed() const { return select([&](int i) { return is_observed(i); }); }
    std::vector<int> unobserved() const { return select([&](int i) { return !is_observed(i); }); }
    std::vector<int> queryable() const { return select([&](int i) { return is_queryable(i); }); }

private:
    template <class Pred>
    std::vector<int> select(Pred&& keep) const {
        std::vector<int> out;
        for (int i = 0; i < n(); ++i)
            if (keep(i)) out.push_back(i);
        return out;
    }
    void check_index(int i) const {
        if (i < 0 || i >= n())
            throw ValidationError("node index " + std::to_string(i) + " out of range");
    }

    const Graph* graph_;
    std::vector<char> observed_;
    std::vector<char> queryable_;
    int num_observed_ = 0;
};

}  // namespace gal
