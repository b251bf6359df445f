#pragma once

// Set algebra over sorted, duplicate-free vectors.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <vector>

namespace mapmatch::sets {

template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Above this size ratio, probing the larger set beats a linear merge.
inline constexpr std::size_t probe_ratio = 16;

template <class T>
std::vector<T> intersection(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out;
    if (b.size() > probe_ratio * a.size()) {
        for (const auto& x : a) {
            if (std::binary_search(b.begin(), b.end(), x)) out.push_back(x);
        }
    } else if (a.size() > probe_ratio * b.size()) {
        for (const auto& x : b) {
            if (std::binary_search(a.begin(), a.end(), x)) out.push_back(x);
        }
    } else {
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    }
    return out;
}

template <class T>
std::vector<T> difference(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out;
    if (b.size() > probe_ratio * a.size()) {
        for (const auto& x : a) {
            if (!std::binary_search(b.begin(), b.end(), x)) out.push_back(x);
        }
    } else {
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    }
    return out;
}

template <class T>
std::vector<T> set_union(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <class T>
bool intersects(const std::vector<T>& a, const std::vector<T>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            return true;
        }
    }
    return false;
}

template <class T>
bool contains(const std::vector<T>& sorted, const T& x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

template <class T>
bool is_subset(const std::vector<T>& sub, const std::vector<T>& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

} // namespace mapmatch::sets
