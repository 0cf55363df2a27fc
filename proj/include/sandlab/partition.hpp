#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sandlab {

/// Integer partition: weakly decreasing sequence of positive parts.
/// The empty partition is the type of the trivial group.
class Partition {
public:
    Partition() = default;

    Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] < 1) throw std::invalid_argument("partition parts must be >= 1");
            if (i + 1 < parts_.size() && parts_[i] < parts_[i + 1])
                throw std::invalid_argument("partition parts must be weakly decreasing");
        }
    }

    static Partition from_unsorted(std::vector<int> parts) {
        std::sort(parts.begin(), parts.end(), std::greater<int>());
        return Partition(std::move(parts));
    }

    const std::vector<int>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    std::size_t length() const { return parts_.size(); }

    /// part(i) with the usual convention lambda_i = 0 beyond the length.
    int part(std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }

    int sum() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

    /// transpose()[j-1] = #{i : lambda_i >= j}
    Partition transpose() const {
        std::vector<int> t;
        if (!parts_.empty()) {
            t.assign(static_cast<std::size_t>(parts_[0]), 0);
            for (int part : parts_)
                for (int j = 0; j < part; ++j) ++t[static_cast<std::size_t>(j)];
        }
        return Partition(std::move(t));
    }

    bool operator==(const Partition& o) const { return parts_ == o.parts_; }
    bool operator!=(const Partition& o) const { return parts_ != o.parts_; }
    bool operator<(const Partition& o) const { return parts_ < o.parts_; }

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts_[i]);
        }
        return s + ")";
    }

private:
    std::vector<int> parts_;
};

/// All partitions with sum <= max_sum and at most max_length parts,
/// the empty partition included.  Used for law tables and normalization sweeps.
inline std::vector<Partition> partitions_up_to(int max_sum, int max_length) {
    std::vector<Partition> out;
    std::vector<int> current;
    std::function<void(int, int)> rec = [&](int remaining, int cap) {
        out.emplace_back(Partition(current));
        if (static_cast<int>(current.size()) >= max_length) return;
        for (int next = std::min(cap, remaining); next >= 1; --next) {
            current.push_back(next);
            rec(remaining - next, next);
            current.pop_back();
        }
    };
    rec(max_sum, max_sum);
    return out;
}

}  // namespace sandlab
