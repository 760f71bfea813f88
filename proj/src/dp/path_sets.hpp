#pragma once

#include <vector>

#include "nsais/model.hpp"

namespace nsais::detail {

// A memory with every state trajectory x_{0:t} consistent with it. The
// trajectories are enumerated directly, without the range filter.
struct PathNode {
    Memory memory;
    std::vector<std::vector<Index>> paths;  // sorted, unique

    IndexSet range() const;
};

class PathSetWalker {
public:
    PathSetWalker(const SystemModel& sys, std::size_t budget) : sys_(sys), budget_(budget) {}

    std::vector<PathNode> roots();
    // One child per observation that some trajectory can produce, in observation order.
    std::vector<PathNode> children(const PathNode& node, Index u);

private:
    void charge(std::size_t n);

    const SystemModel& sys_;
    std::size_t budget_;
    std::size_t count_ = 0;
};

}  // namespace nsais::detail
