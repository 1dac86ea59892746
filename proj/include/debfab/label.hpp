#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "debfab/error.hpp"

namespace debfab {

using Digit = uint32_t;

// The two shift graphs overlaid on the same switches and cables.
// Forward: an edge per digit x, u -> leftshift(u) with x appended on the right.
// Reverse: an edge per digit x, u -> rightshift(u) with x prepended on the left.
enum class GraphDirection : uint8_t { Forward, Reverse };

inline const char* to_string(GraphDirection dir) {
    return dir == GraphDirection::Forward ? "forward" : "reverse";
}

/// A base-d string of m digits naming one vertex of B(d, m), most-significant
/// digit first. Carries its own radix so operations can reject labels from a
/// different graph.
class Label {
public:
    Label() = default;

    Label(std::vector<uint8_t> digits, uint32_t radix)
        : digits_(std::move(digits)), radix_(radix) {
        if (radix_ < 2 || radix_ > 256)
            throw label_error("label radix must be in [2, 256], got " + std::to_string(radix_));
        if (digits_.empty())
            throw label_error("label must have at least one digit");
        for (uint8_t dg : digits_)
            if (dg >= radix_)
                throw label_error("digit " + std::to_string(dg) + " out of range for radix " +
                                  std::to_string(radix_));
    }

    // Label of the vertex with the given index, i.e. value written in base d.
    static Label from_value(uint64_t value, uint32_t radix, uint32_t length) {
        std::vector<uint8_t> ds(length);
        for (uint32_t i = 0; i < length; ++i) {
            ds[length - 1 - i] = static_cast<uint8_t>(value % radix);
            value /= radix;
        }
        if (value != 0)
            throw label_error("value does not fit in " + std::to_string(length) + " base-" +
                              std::to_string(radix) + " digits");
        return Label(std::move(ds), radix);
    }

    // Textual form: one character per digit, 0-9 then a-z, e.g. "101" or "3102".
    static Label parse(const std::string& text, uint32_t radix, uint32_t length) {
        if (text.size() != length)
            throw label_error("label \"" + text + "\" has length " + std::to_string(text.size()) +
                              ", expected " + std::to_string(length));
        std::vector<uint8_t> ds;
        ds.reserve(text.size());
        for (char c : text) {
            int v;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (c >= 'a' && c <= 'z') v = c - 'a' + 10;
            else throw label_error(std::string("invalid digit character '") + c + "'");
            if (v >= static_cast<int>(radix))
                throw label_error("digit " + std::to_string(v) + " out of range for radix " +
                                  std::to_string(radix));
            ds.push_back(static_cast<uint8_t>(v));
        }
        return Label(std::move(ds), radix);
    }

    uint32_t radix() const { return radix_; }
    uint32_t length() const { return static_cast<uint32_t>(digits_.size()); }
    const std::vector<uint8_t>& digits() const { return digits_; }

    // 1-based, most-significant first, matching the written string.
    uint8_t digit(uint32_t pos) const { return digits_.at(pos - 1); }
    uint8_t first_digit() const { return digits_.front(); }
    uint8_t last_digit() const { return digits_.back(); }

    uint64_t value() const {
        uint64_t v = 0;
        for (uint8_t dg : digits_) v = v * radix_ + dg;
        return v;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(digits_.size());
        for (uint8_t dg : digits_)
            s.push_back(dg < 10 ? static_cast<char>('0' + dg) : static_cast<char>('a' + dg - 10));
        return s;
    }

    bool operator==(const Label& other) const = default;

private:
    std::vector<uint8_t> digits_;
    uint32_t radix_ = 2;
};

namespace detail {
inline void check_digit(const Label& label, Digit digit) {
    if (digit >= label.radix())
        throw label_error("digit " + std::to_string(digit) + " out of range for radix " +
                          std::to_string(label.radix()));
}

inline void check_compatible(const Label& a, const Label& b) {
    if (a.radix() != b.radix() || a.length() != b.length())
        throw label_error("labels " + a.to_string() + " and " + b.to_string() +
                          " belong to different graphs");
}
}  // namespace detail

/// Left-shift edge: drop the most-significant digit, append `digit` on the right.
inline Label forward_neighbor(const Label& label, Digit digit) {
    detail::check_digit(label, digit);
    std::vector<uint8_t> ds(label.digits().begin() + 1, label.digits().end());
    ds.push_back(static_cast<uint8_t>(digit));
    return Label(std::move(ds), label.radix());
}

/// Right-shift edge: drop the least-significant digit, prepend `digit` on the left.
inline Label reverse_neighbor(const Label& label, Digit digit) {
    detail::check_digit(label, digit);
    std::vector<uint8_t> ds;
    ds.reserve(label.length());
    ds.push_back(static_cast<uint8_t>(digit));
    ds.insert(ds.end(), label.digits().begin(), label.digits().end() - 1);
    return Label(std::move(ds), label.radix());
}

/// Longest k such that the length-k suffix of `src` equals the length-k prefix
/// of `dst`. Returns m exactly when src == dst.
inline uint32_t longest_overlap(const Label& src, const Label& dst) {
    detail::check_compatible(src, dst);
    const uint32_t m = src.length();
    for (uint32_t k = m; k > 0; --k) {
        bool match = true;
        for (uint32_t i = 0; i < k; ++i) {
            if (src.digits()[m - k + i] != dst.digits()[i]) {
                match = false;
                break;
            }
        }
        if (match) return k;
    }
    return 0;
}

/// Hop count of the shift route from src to dst in the given graph: the number
/// of digits that still have to be shifted in, never more than m.
inline uint32_t debruijn_distance(const Label& src, const Label& dst, GraphDirection dir) {
    detail::check_compatible(src, dst);
    const uint32_t m = src.length();
    if (dir == GraphDirection::Forward) return m - longest_overlap(src, dst);
    return m - longest_overlap(dst, src);
}

}  // namespace debfab

template <>
struct std::hash<debfab::Label> {
    size_t operator()(const debfab::Label& l) const noexcept {
        size_t h = l.radix();
        for (uint8_t d : l.digits()) h = h * 1000003u + d;
        return h;
    }
};
