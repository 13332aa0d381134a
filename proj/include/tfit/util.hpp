#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tfit {

// Heterogeneous lookup so maps keyed by std::string accept string_view probes.
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
    std::size_t operator()(const std::string& s) const noexcept {
        return std::hash<std::string_view>{}(std::string_view(s));
    }
};

using StringIdMap = std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>>;

// Grow-only string pool handing out dense ids in insertion order.
class Interner {
public:
    std::uint32_t intern(std::string_view s) {
        auto it = ids_.find(s);
        if (it != ids_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(items_.size());
        items_.emplace_back(s);
        ids_.emplace(items_.back(), id);
        return id;
    }
    const std::string& name(std::uint32_t id) const { return items_[id]; }
    std::size_t size() const { return items_.size(); }
    const std::vector<std::string>& items() const { return items_; }

private:
    std::vector<std::string> items_;
    StringIdMap ids_;
};

std::vector<std::string_view> split_tabs(std::string_view line);

bool valid_utf8(std::string_view s);

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v);

}  // namespace tfit
