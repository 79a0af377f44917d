#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace extlm::testutil {

// Counts ordered trees with exactly parts[i] vertices of out-degree i,
// by direct recursive construction.  Exponential, for tiny shapes only;
// serves as the independent oracle for the enumerative tree code.
inline std::uint64_t brute_force_trees(std::vector<std::uint64_t> parts) {
    std::map<std::vector<std::uint64_t>, std::uint64_t> memo;
    std::function<std::uint64_t(std::vector<std::uint64_t>&)> rec =
        [&](std::vector<std::uint64_t>& left) -> std::uint64_t {
        std::uint64_t total_nodes = 0;
        for (auto v : left) total_nodes += v;
        if (total_nodes == 0) return 0;
        if (total_nodes == 1) return left[0] == 1 ? 1 : 0;
        auto it = memo.find(left);
        if (it != memo.end()) return it->second;
        std::uint64_t total = 0;
        for (std::size_t d = 1; d < left.size(); ++d) {
            if (left[d] == 0) continue;
            --left[d];
            // distribute what's left over d ordered subtrees
            std::function<std::uint64_t(std::size_t, std::vector<std::uint64_t>&)> split =
                [&](std::size_t slots, std::vector<std::uint64_t>& rem) -> std::uint64_t {
                if (slots == 1) return rec(rem);
                std::uint64_t ways = 0;
                std::vector<std::uint64_t> first(rem.size(), 0);
                std::function<std::uint64_t(std::size_t)> choose =
                    [&](std::size_t i) -> std::uint64_t {
                    if (i == rem.size()) {
                        std::uint64_t cnt_first = rec(first);
                        if (cnt_first == 0) return 0;
                        std::vector<std::uint64_t> rest(rem.size());
                        for (std::size_t j = 0; j < rem.size(); ++j) rest[j] = rem[j] - first[j];
                        return cnt_first * split(slots - 1, rest);
                    }
                    std::uint64_t acc = 0;
                    for (std::uint64_t take = 0; take <= rem[i]; ++take) {
                        first[i] = take;
                        acc += choose(i + 1);
                    }
                    first[i] = 0;
                    return acc;
                };
                ways = choose(0);
                return ways;
            };
            total += split(d, left);
            ++left[d];
        }
        memo[left] = total;
        return total;
    };
    return rec(parts);
}

}  // namespace extlm::testutil
